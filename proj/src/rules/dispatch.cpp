#include "modchat/rules/dispatch.hpp"

#include "machine.hpp"
#include "modchat/common/errors.hpp"

namespace modchat::rules {

std::vector<Effect> dispatch(std::string_view verb, const Term& payload, const Rulebase& rb,
                             int depth_limit, Diagnostics* diagnostics)
{
    if (!payload.is<SlotMap>())
        throw PreconditionError("dispatch: payload must be a slot map, got " + to_string(payload));
    if (!payload.is_ground())
        throw PreconditionError("dispatch: payload must be ground, got " + to_string(payload));
    if (depth_limit < 1)
        throw PreconditionError("dispatch: depth_limit must be at least 1");

    const detail::Message message{std::string(verb), payload};
    Diagnostics local;
    Diagnostics& diag = diagnostics ? *diagnostics : local;
    std::vector<Effect> effects;

    std::uint64_t clause_no = 0;
    for (const auto& clause : rb.clauses()) {
        ++clause_no;
        if (clause.body.empty() || clause.body.front().key() != "rcvMult/5")
            continue;
        detail::Store store;
        detail::Context ctx{rb, depth_limit, diag, effects, &message};
        ctx.renames = clause_no << 32;
        const Clause entry = detail::rename(clause, clause_no);
        auto ancestry = std::make_shared<const detail::Ancestry>(detail::Ancestry{entry.head, nullptr});
        detail::Machine machine(ctx, store, detail::push_goals(entry.body, 0, 1, ancestry, nullptr));
        // The message is accepted irrevocably: only the first solution runs.
        machine.next();
    }
    return effects;
}

} // namespace modchat::rules

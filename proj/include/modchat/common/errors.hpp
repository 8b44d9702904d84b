#pragma once

#include <stdexcept>
#include <string>

namespace modchat {

// Input failed a domain invariant (bad country code, age out of range, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke an operation's precondition.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class AuthenticationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unknown pod, grant, session or room.
class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A remote collaborator (LLM, pod service, ...) failed or answered garbage.
class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace modchat

#include "ignite/errors.hpp"

namespace ignite {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::shape: return "shape";
        case ErrorKind::empty_input: return "empty_input";
        case ErrorKind::parameter: return "parameter";
        case ErrorKind::config: return "config";
        case ErrorKind::domain: return "domain";
        case ErrorKind::singular: return "singular";
        case ErrorKind::io: return "io";
        case ErrorKind::diverged: return "diverged";
    }
    return "unknown";
}

}  // namespace ignite

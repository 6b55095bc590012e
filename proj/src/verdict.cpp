#include "sotest/verdict.hpp"

namespace sotest {

std::string to_string(View v) {
    return v == View::gray ? "gray" : "black";
}

std::string to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::missing_agent: return "missing_agent";
        case ViolationKind::duplicate_agent: return "duplicate_agent";
        case ViolationKind::foreign_agent: return "foreign_agent";
        case ViolationKind::size_bound: return "size_bound";
        case ViolationKind::count_bound: return "count_bound";
        case ViolationKind::smoke: return "smoke";
    }
    return "unknown";
}

}  // namespace sotest

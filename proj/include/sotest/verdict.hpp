#pragma once

#include <string>
#include <vector>

namespace sotest {

enum class View { gray, black };

enum class ViolationKind {
    missing_agent,
    duplicate_agent,
    foreign_agent,
    size_bound,
    count_bound,
    smoke,
};

std::string to_string(View v);
std::string to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    std::vector<int> subjects;  // offending agent ids; empty for count_bound/smoke
    View view = View::gray;
};

struct Verdict {
    bool passed = true;
    std::vector<Violation> violations;

    static Verdict pass() { return Verdict{}; }
    static Verdict fail(std::vector<Violation> v) { return Verdict{false, std::move(v)}; }
};

}  // namespace sotest

#ifndef RTREE_COVER_REPORT_HPP
#define RTREE_COVER_REPORT_HPP

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rtree_cover {

/// Process exit codes shared by every command.
enum class ExitCode : int { pass = 0, input_error = 1, violation = 2 };

struct Violation {
    std::vector<std::string> witness;  ///< path expressions (or rationals) making up the offending tuple
    std::string reason;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Outcome of an exhaustive or sampled property check.
struct CheckReport {
    std::string check;
    std::size_t instances = 0;
    std::vector<Violation> violations;

    bool passed() const { return violations.empty(); }

    void fail(std::vector<std::string> witness, std::string reason) {
        violations.push_back({std::move(witness), std::move(reason)});
    }

    /// Folds another report's counts and violations into this one.
    void absorb(const CheckReport& other) {
        instances += other.instances;
        violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    }

    nlohmann::json to_json() const {
        nlohmann::json out;
        out["check"] = check;
        out["instances"] = instances;
        out["passed"] = passed();
        auto list = nlohmann::json::array();
        for (const auto& v : violations) list.push_back({{"witness", v.witness}, {"reason", v.reason}});
        out["violations"] = std::move(list);
        return out;
    }
};

inline ExitCode exit_code(const CheckReport& r) { return r.passed() ? ExitCode::pass : ExitCode::violation; }

} // namespace rtree_cover

#endif // RTREE_COVER_REPORT_HPP

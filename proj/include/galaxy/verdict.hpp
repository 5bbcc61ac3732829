#pragma once

#include <string>
#include <vector>

namespace galaxy {

enum class VerdictKind { Holds, Violated, Unknown, Timeout, Crash };

std::string verdict_kind_name(VerdictKind k);

/// Verifier outcome. Unknown and Timeout are compatible with every other
/// verdict; Holds conflicts with a validated Violated.
struct Verdict {
    VerdictKind kind = VerdictKind::Unknown;
    std::vector<double> cex;  // Violated only
    std::string note;         // Unknown reason / Crash diagnostic

    static Verdict holds() { return {VerdictKind::Holds, {}, {}}; }
    static Verdict violated(std::vector<double> x) {
        return {VerdictKind::Violated, std::move(x), {}};
    }
    static Verdict unknown(std::string reason) {
        return {VerdictKind::Unknown, {}, std::move(reason)};
    }
    static Verdict timeout() { return {VerdictKind::Timeout, {}, {}}; }
    static Verdict crash(std::string diagnostic) {
        return {VerdictKind::Crash, {}, std::move(diagnostic)};
    }

    bool operator==(const Verdict&) const = default;
};

}  // namespace galaxy

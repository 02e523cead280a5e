// Acceptance suite: one PASS/FAIL line per criterion.

#include <cstdio>
#include <string>
#include <vector>

#include <hardy/scenarios.hpp>

using namespace hardy;

namespace {

struct Line {
    std::string id;
    bool ok;
    std::string detail;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

bool metrics_ok(const ScenarioReport& r, const std::vector<std::string>& names, std::string& detail)
{
    bool ok = r.error.empty();
    if (!ok)
        detail += " error: " + r.error;
    for (const auto& n : names) {
        const Metric* m = r.metric(n);
        if (!m) {
            detail += " missing " + n;
            ok = false;
            continue;
        }
        ok = ok && m->ok();
        detail += " " + n + "=" + fmt(m->value) + " (" + m->rule() + ")";
    }
    return ok;
}

ScenarioReport run(const std::string& id, std::map<std::string, std::string> kv = {})
{
    ScenarioParams p;
    p.kv = std::move(kv);
    return run_scenario(id, p, false);
}

} // namespace

int main()
{
    std::vector<Line> lines;

    {
        std::string d;
        bool ok = true;
        double worst = 0.0;
        for (const char* theta : {"2,3", "1,4,0", "4,4,2,1", "3", "4,1"}) {
            const ScenarioReport r = run("beurling", {{"theta", theta}, {"N", "16"}});
            ok = ok && r.passed;
            worst = std::max(worst, r.value("model_distance"));
        }
        d = " worst model_distance=" + fmt(worst) + " (<= 1e-10) over 5 diagonal monomial symbols";
        lines.push_back({"AC1", ok && worst <= 1e-10, d});
    }
    {
        std::string d;
        const bool ok = metrics_ok(run("lemma_orthocomplement"), {"band_distance"}, d);
        lines.push_back({"AC2", ok, d});
    }
    {
        std::string d;
        const bool ok = metrics_ok(run("lemma_nearly"), {"certified_defect0", "residual"}, d);
        lines.push_back({"AC3", ok, d});
    }
    const ScenarioReport f0k = run("prop_F0K_almost");
    {
        std::string d;
        const bool ok = metrics_ok(f0k, {"host_nearly_defect0", "defect_dim", "defect_span_distance"}, d);
        lines.push_back({"AC4", ok, d});
    }
    {
        std::string d;
        const bool ok =
            metrics_ok(run("counterexample"), {"certify_defect0_fails", "minimal_defect", "residual", "residual_upper"}, d);
        lines.push_back({"AC5", ok, d});
    }
    {
        const ScenarioReport r = run("main_defectp");
        std::string d;
        std::vector<std::string> names;
        for (const char* tag : {"r1p1_", "r2p1_", "r1p2_", "r2p2_"})
            for (const char* n : {"certified", "K_distance", "norm_gap", "iterations", "converged"})
                names.push_back(std::string(tag) + n);
        const bool ok = metrics_ok(r, names, d) && r.passed;
        lines.push_back({"AC6", ok, " r in {1,2}, p in {1,2}:" + d});
    }
    {
        std::string d;
        const bool ok = metrics_ok(run("corollary_almost"),
                                   {"empty_defect_false", "empty_defect_residual_error", "defect1_true",
                                    "defect1_residual"},
                                   d);
        lines.push_back({"AC7", ok, d});
    }
    {
        std::string d;
        const bool ok = metrics_ok(run("duality"), {"agreements", "pairs_true", "pairs_false"}, d);
        lines.push_back({"AC8", ok, d});
    }
    {
        std::string d;
        const bool ok = metrics_ok(run("section4"), {"agreements", "members", "non_members"}, d);
        lines.push_back({"AC9", ok, d});
    }
    {
        std::string d;
        const bool ok = metrics_ok(f0k, {"band_dim_N16", "band_dim_N32", "band_dim_N48", "band_dim_strictly_increasing"}, d);
        lines.push_back({"AC10", ok, d + " (heuristic truncation-band surrogate)"});
    }

    int failed = 0;
    for (const auto& l : lines) {
        std::printf("%-5s %s%s\n", l.id.c_str(), l.ok ? "PASS" : "FAIL", l.detail.c_str());
        failed += l.ok ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(lines.size()) - failed, lines.size());
    return failed == 0 ? 0 : 1;
}

// hardyctl: command-line front end for the hardy library.
//
// Exit codes: 0 pass, 1 mathematical failure, 2 usage or parse error.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <hardy/hardy.hpp>

namespace {

using hardy::io::json;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Globals {
    double tol = hardy::kDefaultTol;
    std::uint64_t seed = 0;
};

int cmd_decompose(const Globals& g, const std::string& space_file, const std::string& defect_file,
                  const std::string& fn_file, double eps, int kmax)
{
    const hardy::Subspace m = hardy::io::space_from_json(hardy::io::load_file(space_file), g.tol);
    std::vector<hardy::CoeffFn> defect;
    if (!defect_file.empty())
        defect = hardy::io::functions_from_json(hardy::io::load_file(defect_file), "$");
    const hardy::CoeffFn f = hardy::io::function_from_json(hardy::io::load_file(fn_file));
    hardy::DecompOptions opts;
    opts.eps = eps;
    opts.k_max = kmax;
    try {
        const hardy::DecompResult d = hardy::decompose(m, defect, f, opts);
        std::cout << hardy::io::decomp_to_json(d).dump(2) << "\n";
        return d.converged ? kPass : kFail;
    } catch (const hardy::NotNearlyInvariant& e) {
        json out = {{"error", "NOT-NEARLY-INVARIANT"},
                    {"step", e.step()},
                    {"residual", e.residual()},
                    {"remainder", hardy::io::function_to_json(e.remainder())}};
        std::cout << out.dump(2) << "\n";
        std::cerr << "hardyctl: " << e.what() << "\n";
        return kFail;
    }
}

int cmd_certify(const Globals& g, const std::string& space_file, int p, const std::string& op,
                const std::string& mode)
{
    const hardy::Subspace m = hardy::io::space_from_json(hardy::io::load_file(space_file), g.tol);
    hardy::DefectCertificate c;
    if (mode == "nearly") {
        if (op != "S*")
            throw hardy::UsageError("nearly invariance is defined for S* only");
        c = hardy::certify_nearly(m, p).cert;
    } else {
        c = hardy::defect_of(m, op == "S" ? hardy::Op::S : hardy::Op::Sstar);
    }
    json out = hardy::io::certificate_to_json(c);
    out["p_max"] = p;
    out["passed"] = c.defect_dim <= p;
    std::cout << out.dump(2) << "\n";
    return c.defect_dim <= p ? kPass : kFail;
}

int cmd_model_space(const Globals& g, const std::string& theta_file, int order)
{
    const hardy::MatSymbol t = hardy::io::symbol_from_json(hardy::io::load_file(theta_file));
    const hardy::Subspace k = hardy::model_space(t, order, g.tol);
    std::cout << hardy::io::space_to_json(k).dump(2) << "\n";
    return kPass;
}

int cmd_scenario(const Globals& g, const std::string& id, const std::vector<std::string>& params, bool markdown,
                 bool timing)
{
    hardy::ScenarioParams sp;
    sp.seed = g.seed;
    sp.tol = g.tol;
    for (const auto& kv : params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw hardy::UsageError("--param expects key=value, got \"" + kv + "\"");
        sp.kv[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    std::vector<hardy::ScenarioReport> reports;
    if (id == "all") {
        if (!sp.kv.empty())
            throw hardy::UsageError("--param is not accepted with \"scenario all\"");
        reports = hardy::run_all(sp, timing);
    } else {
        reports.push_back(hardy::run_scenario(id, sp, timing));
    }
    bool ok = true;
    for (const auto& r : reports)
        ok = ok && r.passed;

    if (markdown) {
        std::cout << hardy::report_to_markdown(reports);
    } else if (id == "all") {
        json arr = json::array();
        for (const auto& r : reports)
            arr.push_back(hardy::report_to_json(r));
        std::cout << arr.dump(2) << "\n";
    } else {
        std::cout << hardy::report_to_json(reports.front()).dump(2) << "\n";
    }
    return ok ? kPass : kFail;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Truncated vector-valued Hardy space workbench"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--tol", g.tol, "Rank tolerance")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "Seed for randomized scenarios");

    auto* dec = app.add_subcommand("decompose", "Decompose F in M as F_0 K_0 + sum z k_j E_j");
    std::string space, defect, fn;
    double eps = 1e-10;
    int kmax = -1;
    dec->add_option("--space", space, "Subspace JSON")->required()->check(CLI::ExistingFile);
    dec->add_option("--defect", defect, "Defect basis JSON (array of functions)")->check(CLI::ExistingFile);
    dec->add_option("--function", fn, "Function JSON")->required()->check(CLI::ExistingFile);
    dec->add_option("--eps", eps, "Stop when ||G_k|| < eps");
    dec->add_option("--kmax", kmax, "Iteration cap (default N + p + 8)");

    auto* cert = app.add_subcommand("certify", "Certify the invariance defect of a subspace");
    std::string op = "S*", mode = "nearly";
    int p = 0;
    cert->add_option("--space", space, "Subspace JSON")->required()->check(CLI::ExistingFile);
    cert->add_option("--p", p, "Largest acceptable defect")->check(CLI::NonNegativeNumber);
    cert->add_option("--op", op, "S or S*")->check(CLI::IsMember({"S", "S*"}));
    cert->add_option("--mode", mode, "nearly or almost")->check(CLI::IsMember({"nearly", "almost"}));

    auto* ms = app.add_subcommand("model-space", "Print an orthonormal basis of K_Theta");
    std::string theta;
    int order = 0;
    ms->add_option("--theta", theta, "Symbol JSON")->required()->check(CLI::ExistingFile);
    ms->add_option("--order", order, "Ambient degree N")->required()->check(CLI::NonNegativeNumber);

    auto* sc = app.add_subcommand("scenario", "Run a named verification scenario, or all");
    std::string id;
    std::vector<std::string> params;
    bool as_json = false, as_md = false, no_timing = false;
    sc->add_option("id", id, "Scenario id or \"all\"")->required();
    sc->add_option("--param", params, "Override key=value")->allow_extra_args(false);
    auto* jflag = sc->add_flag("--json", as_json, "JSON output (default)");
    sc->add_flag("--markdown", as_md, "Markdown table output")->excludes(jflag);
    sc->add_flag("--no-timing", no_timing, "Report runtime_ms as 0 for reproducible output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    try {
        if (*dec)
            return cmd_decompose(g, space, defect, fn, eps, kmax);
        if (*cert)
            return cmd_certify(g, space, p, op, mode);
        if (*ms)
            return cmd_model_space(g, theta, order);
        if (*sc)
            return cmd_scenario(g, id, params, as_md, !no_timing);
    } catch (const hardy::ParseError& e) {
        std::cerr << "hardyctl: parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const hardy::UsageError& e) {
        std::cerr << "hardyctl: " << e.what() << "\n";
        return kUsage;
    } catch (const hardy::DimensionMismatch& e) {
        std::cerr << "hardyctl: " << e.what() << "\n";
        return kUsage;
    } catch (const hardy::HardyError& e) {
        std::cerr << "hardyctl: " << e.what() << "\n";
        return kFail;
    }
    return kUsage;
}

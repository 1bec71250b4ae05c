// qakit: scenario-driven batch runner. Parses a scenario file (or builds one
// from flags for the verify subcommands), dispatches to the library, prints a
// [PASS]/[FAIL] line per item, and writes the JSON report plus ladder CSVs.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qakit/scenario.hpp"

namespace {

namespace sc = qakit::scenario;

std::string resolve_out_dir(const std::string& flag_value) {
    if (const char* env = std::getenv("QAKIT_OUT"); env && *env) return env;
    return flag_value;
}

int run_and_report(const sc::Scenario& s, unsigned jobs, const std::string& out_flag) {
    const auto rep = sc::run_scenario(s, jobs);
    for (const auto& item : rep.items) {
        std::cout << (item.pass ? "[PASS] " : "[FAIL] ") << item.label;
        if (!item.note.empty()) std::cout << "  " << item.note;
        std::cout << '\n';
    }
    const auto files = sc::write_report_files(rep, resolve_out_dir(out_flag));
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", rep.wall_clock_seconds);
    std::cout << rep.scenario.name << ": " << (rep.pass ? "PASS" : "FAIL") << " ("
              << rep.items.size() << " items, " << buf << " s)\n";
    return rep.pass ? 0 : 1;
}

sc::Scenario load_for(sc::Kind expect, const std::string& path) {
    auto s = sc::parse_scenario(path);
    if (s.kind != expect)
        throw sc::ScenarioError("scenario kind mismatch (" + path + ")",
                                {std::string("/kind: expected ") + sc::kind_name(expect) +
                                 ", got " + sc::kind_name(s.kind)});
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qakit: structured quasiasymptotics, batch checks and ladders"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    unsigned jobs = 1;
    double tol = 0.0;
    std::vector<CLI::Option*> tol_opts;
    const auto add_common = [&](CLI::App* cmd, bool with_tol) {
        cmd->add_option("--out", out_dir, "output directory (env QAKIT_OUT overrides)")
            ->capture_default_str();
        cmd->add_option("--jobs", jobs, "parallel workers for independent ladder points")
            ->capture_default_str();
        if (with_tol)
            tol_opts.push_back(cmd->add_option("--tol", tol, "override the pass tolerance"));
    };

    auto* comb_cmd = app.add_subcommand("comb", "exact combinatorial identities");
    comb_cmd->require_subcommand(1);
    auto* comb_verify = comb_cmd->add_subcommand("verify", "run the identity suite");
    unsigned m_max = 12;
    comb_verify->add_option("--m-max", m_max, "largest derivative order for the reciprocal oracle")
        ->capture_default_str();
    add_common(comb_verify, false);

    auto* weights_cmd = app.add_subcommand("weights", "weight-sequence tail estimates");
    weights_cmd->require_subcommand(1);
    auto* weights_verify = weights_cmd->add_subcommand("verify", "certify tail bound constants");
    double gevrey_s = 2.0;
    std::vector<double> ell = {0.25, 0.5, 1.0, 2.0, 4.0};
    unsigned p_max = 50;
    double tail_tol = 1e-12;
    weights_verify->add_option("--gevrey", gevrey_s, "Gevrey order s (> 1)")
        ->capture_default_str();
    weights_verify->add_option("--ell", ell, "geometric parameters to certify")
        ->capture_default_str();
    weights_verify->add_option("--p-max", p_max, "largest p in the envelope scan")
        ->capture_default_str();
    weights_verify->add_option("--tol", tail_tol, "tail certification tolerance")
        ->capture_default_str();
    weights_verify->add_option("--out", out_dir, "output directory (env QAKIT_OUT overrides)")
        ->capture_default_str();

    auto* qa_cmd = app.add_subcommand("qa", "quasiasymptotic ladders from a scenario file");
    qa_cmd->require_subcommand(1);
    std::string path_limit, path_negint, path_extend, path_zlocal;
    auto* qa_limit = qa_cmd->add_subcommand("limit", "ratio ladder vs predicted constants");
    qa_limit->add_option("scenario", path_limit, "QuasiLimit scenario file")->required();
    add_common(qa_limit, true);
    auto* qa_negint = qa_cmd->add_subcommand("negint", "degree -1 expansion residuals");
    qa_negint->add_option("scenario", path_negint, "NegIntExpansion scenario file")->required();
    add_common(qa_negint, true);
    auto* qa_extend = qa_cmd->add_subcommand("extend", "extension expansion residuals");
    qa_extend->add_option("scenario", path_extend, "Extension scenario file")->required();
    add_common(qa_extend, true);
    auto* qa_zlocal = qa_cmd->add_subcommand("zlocal", "z-space locality decay");
    qa_zlocal->add_option("scenario", path_zlocal, "ZLocality scenario file")->required();
    add_common(qa_zlocal, true);

    const auto tol_given = [&](std::size_t i) { return tol_opts[i]->count() > 0; };

    int rc = 0;
    comb_verify->callback([&] {
        sc::Scenario s;
        s.name = "comb-verify";
        s.kind = sc::Kind::CombVerify;
        s.comb_m_max = m_max;
        rc = run_and_report(s, jobs, out_dir);
    });
    weights_verify->callback([&] {
        sc::Scenario s;
        s.name = "weights-verify";
        s.kind = sc::Kind::WeightsVerify;
        s.gevrey_s = gevrey_s;
        sc::WeightsSection ws;
        ws.ell = ell;
        ws.p_max = p_max;
        s.weights = std::move(ws);
        s.tol.tail = tail_tol;
        rc = run_and_report(s, jobs, out_dir);
    });
    qa_limit->callback([&] {
        auto s = load_for(sc::Kind::QuasiLimit, path_limit);
        if (tol_given(0)) s.tol.rel_limit = tol;
        rc = run_and_report(s, jobs, out_dir);
    });
    qa_negint->callback([&] {
        auto s = load_for(sc::Kind::NegIntExpansion, path_negint);
        if (tol_given(1)) s.tol.residual = tol;
        rc = run_and_report(s, jobs, out_dir);
    });
    qa_extend->callback([&] {
        auto s = load_for(sc::Kind::Extension, path_extend);
        if (tol_given(2)) s.tol.residual = tol;
        rc = run_and_report(s, jobs, out_dir);
    });
    qa_zlocal->callback([&] {
        auto s = load_for(sc::Kind::ZLocality, path_zlocal);
        if (tol_given(3)) s.tol.residual = tol;
        rc = run_and_report(s, jobs, out_dir);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return rc;
}

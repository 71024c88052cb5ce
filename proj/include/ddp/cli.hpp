#pragma once

// Command-line driver. run() works in-process so tests can call it directly.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddp/io.hpp"

namespace ddp::cli {

enum ExitCode : int {
    ok = 0,
    usage = 1,
    infeasible = 2,
    obstruction = 3,
    numerical = 4,
};

struct Options {
    std::string command;
    std::string problem = "p1";
    std::optional<double> tol;
    std::uint64_t seed = 1;
    int samples = 20;
    std::string input;
    std::string output;
};

namespace detail {

inline int exit_code_for(ErrorKind k)
{
    switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::ShapeError:
    case ErrorKind::InvalidInput:
    case ErrorKind::DimensionMismatch: return usage;
    case ErrorKind::Infeasible:
    case ErrorKind::NoSolution: return infeasible;
    case ErrorKind::WellPosednessObstruction:
    case ErrorKind::AllSingular: return obstruction;
    default: return numerical;
    }
}

inline io::ProblemFile load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open \"" + path + "\"");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    io::Json doc;
    try {
        doc = io::Json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        return io::parse_problem_text(text);  // rethrows with a line number
    }
    // result files nest the plant
    if (doc.is_object() && doc.contains("plant")) {
        io::Json flat = doc.at("plant");
        if (doc.contains("compensator")) flat["compensator"] = doc.at("compensator");
        if (doc.contains("tolerances")) flat["tolerances"] = doc.at("tolerances");
        return io::parse_problem_json(flat);
    }
    return io::parse_problem_json(doc);
}

inline std::string verdict_name(Verdict v)
{
    return v == Verdict::solvable ? "solvable" : to_string(v);
}

inline int verdict_code(Verdict v)
{
    switch (v) {
    case Verdict::solvable: return ok;
    case Verdict::infeasible: return infeasible;
    case Verdict::well_posedness_obstruction: return obstruction;
    }
    return numerical;
}

inline io::Json tolerance_json(const ToleranceProfile& t)
{
    return {{"rank_rel", t.rank_rel}, {"angle", t.angle}, {"residual", t.residual}, {"ortho", t.ortho}};
}

inline int analyze(const Options& opt, const io::ProblemFile& f, io::Json& out, std::ostream& err)
{
    const ProblemKind pk = opt.problem == "p2" ? ProblemKind::p2 : ProblemKind::p1;
    const AnalyzeOptions aopt{f.tol, 64, opt.seed};
    const FeasibilityReport rep = pk == ProblemKind::p1 ? analyze_p1(f.sys, aopt) : analyze_p2(f.sys, aopt);
    out["verdict"] = verdict_name(rep.overall);
    if (!rep.failed_condition.empty()) out["failed_condition"] = rep.failed_condition;
    out["conditions"] = io::conditions_json(rep);
    out["dims"] = {{"V_star", rep.V_star.dim()}, {"S_star", rep.S_star.dim()}, {"V", rep.V.dim()}, {"S", rep.S.dim()}};
    if (rep.K) out["K"] = io::matrix_json(*rep.K);
    if (rep.alternative_route_agrees) out["alternative_route_agrees"] = *rep.alternative_route_agrees;
    err << "analyze " << opt.problem << ": " << verdict_name(rep.overall);
    if (!rep.failed_condition.empty()) err << " (condition " << rep.failed_condition << ")";
    err << "\n";
    return verdict_code(rep.overall);
}

inline int solve_cmd(const Options& opt, const io::ProblemFile& f, io::Json& out, std::ostream& err)
{
    const ProblemKind pk = opt.problem == "p2" ? ProblemKind::p2 : ProblemKind::p1;
    SolveOptions sopt;
    sopt.tol = f.tol;
    sopt.seed = opt.seed;
    sopt.samples = opt.samples;
    try {
        const SolveResult res = solve(f.sys, pk, sopt);
        out["verdict"] = "solved";
        out["conditions"] = io::conditions_json(res.report);
        out["compensator"] = io::compensator_json(res.compensator);
        out["K"] = io::matrix_json(res.K);
        out["F"] = io::matrix_json(res.F);
        out["G"] = io::matrix_json(res.G);
        out["certificate"] = io::certificate_json(res.certificate);
        out["transfer_max"] = res.transfer_max;
        if (res.stability)
            out["stability"] = {{"pass", res.stability->pass}, {"worst", res.stability->worst},
                                {"spectrum", io::spectrum_json(res.stability->spectrum)}};
        err << "solve " << opt.problem << ": solved, certificate residuals " << res.certificate.residual_invariance
            << " / " << res.certificate.residual_kernel << "\n";
        return ok;
    } catch (const SolveFailure& e) {
        out["verdict"] = e.kind() == ErrorKind::CertificateFailed ? "certificate_failed" : verdict_name(e.report().overall);
        if (!e.report().failed_condition.empty()) out["failed_condition"] = e.report().failed_condition;
        out["conditions"] = io::conditions_json(e.report());
        err << "solve " << opt.problem << ": " << e.what() << "\n";
        return exit_code_for(e.kind());
    }
}

inline int verify_cmd(const Options& opt, const io::ProblemFile& f, io::Json& out, std::ostream& err)
{
    if (!f.compensator) throw Error(ErrorKind::ParseError, "verify needs a \"compensator\" object in the input");
    const ClosedLoop cl = close_loop(f.sys, *f.compensator);
    const DecouplingCertificate cert = certify_decoupled(cl, f.tol);
    const double tmax = transfer_samples(cl, sample_points(cl, opt.samples, opt.seed));
    bool pass = cert.valid();
    out["certificate"] = io::certificate_json(cert);
    out["transfer_max"] = tmax;
    if (opt.problem == "p2") {
        const StabilityResult st = stability_check(cl.A_hat, f.sys.region(stability_margin));
        out["stability"] = {{"pass", st.pass}, {"worst", st.worst}, {"spectrum", io::spectrum_json(st.spectrum)}};
        pass = pass && st.pass;
    }
    out["verdict"] = pass ? "verified" : "not_verified";
    err << "verify " << opt.problem << ": " << (pass ? "verified" : "not verified") << ", max |G_zw| " << tmax << "\n";
    return pass ? ok : infeasible;
}

}  // namespace detail

/// Parses argv-style arguments (without the program name) and runs the command.
/// The result file goes to --output, or to `out` when no path is given.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options opt;
    CLI::App app{"Disturbance decoupling by dynamic output feedback"};
    app.require_subcommand(1);
    std::string tol_text;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--problem", opt.problem, "p1 (decoupling) or p2 (decoupling with stability)")
            ->check(CLI::IsMember({"p1", "p2"}));
        sub->add_option("--tol", tol_text, "relative rank threshold");
        sub->add_option("--seed", opt.seed, "seed for sampling and K selection");
        sub->add_option("--samples", opt.samples, "number of transfer-function samples")->check(CLI::PositiveNumber);
        sub->add_option("--input", opt.input, "problem file (JSON)")->required();
        sub->add_option("--output", opt.output, "result file; standard output when omitted");
    };
    for (const char* name : {"analyze", "solve", "verify"}) {
        CLI::App* sub = app.add_subcommand(name, std::string(name) + " a plant file");
        add_common(sub);
        sub->callback([&opt, name] { opt.command = name; });
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return usage;
    }
    if (!tol_text.empty()) {
        try {
            std::size_t used = 0;
            opt.tol = std::stod(tol_text, &used);
            if (used != tol_text.size() || !(*opt.tol > 0)) throw std::invalid_argument("tol");
        } catch (const std::exception&) {
            err << "usage error: --tol expects a positive number\n";
            return usage;
        }
    }

    io::Json result;
    int code = ok;
    try {
        io::ProblemFile f = detail::load(opt.input);
        if (opt.tol) f.tol.rank_rel = *opt.tol;
        f.tol.validate();
        result["command"] = opt.command;
        result["problem"] = opt.problem;
        result["seed"] = opt.seed;
        if (opt.command == "analyze") code = detail::analyze(opt, f, result, err);
        else if (opt.command == "solve") code = detail::solve_cmd(opt, f, result, err);
        else code = detail::verify_cmd(opt, f, result, err);
        result["tolerances"] = detail::tolerance_json(f.tol);
        result["plant"] = io::plant_json(f.sys);
        if (opt.command == "verify" && f.compensator) result["compensator"] = io::compensator_json(*f.compensator);
    } catch (const Error& e) {
        err << to_string(e.kind()) << ": " << e.what() << "\n";
        code = detail::exit_code_for(e.kind());
        if (code == usage) return code;
        result["verdict"] = "error";
        result["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    }
    result["exit_code"] = code;

    const std::string text = result.dump(2) + "\n";
    if (opt.output.empty()) {
        out << text;
    } else {
        std::ofstream f(opt.output);
        if (!f) {
            err << "cannot write \"" << opt.output << "\"\n";
            return usage;
        }
        f << text;
    }
    return code;
}

}  // namespace ddp::cli

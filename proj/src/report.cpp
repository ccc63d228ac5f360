#include "lqw/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "lqw/curve.hpp"
#include "lqw/grid.hpp"
#include "lqw/lap.hpp"
#include "lqw/quasimode.hpp"
#include "lqw/spectrum.hpp"
#include "lqw/wave.hpp"

namespace lqw::report {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(const std::vector<std::string>& columns)
    : ncols_(columns.size()) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) body_ += ',';
        body_ += columns[i];
    }
    body_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != ncols_)
        throw std::invalid_argument("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) body_ += ',';
        body_ += cells[i];
    }
    body_ += '\n';
}

void CsvWriter::row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double c : cells) s.push_back(format_double(c));
    row(s);
}

std::string checksum_hex(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string write_artifact(const std::string& dir, const std::string& name,
                           const std::string& content, RunResult& result) {
    namespace fs = std::filesystem;
    const fs::path path = fs::path(dir) / name;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    out.close();
    result.artifacts.push_back({name, checksum_hex(content), content.size()});
    return path.string();
}

namespace {

json frame_json(const curve::AsymptoticFrame& f) {
    return {{"rho", f.rho},
            {"tail_bound", f.tail_bound},
            {"self_intersection", f.self_intersection},
            {"phi_plus_inf", f.phi_plus_inf},
            {"phi_minus_inf", f.phi_minus_inf}};
}

PipelineStatus run_curve_check(const config::RunConfig& cfg,
                               RunResult& result) {
    curve::Curve c = curve::build_curve(cfg.profile, cfg.truncation);
    auto rep = curve::check_assumptions(c, 3.5, 1.0);
    json j;
    j["frame"] = frame_json(c.frame());
    j["all_pass"] = rep.all_pass;
    j["assumptions"] = json::array();
    for (const auto& it : rep.items)
        j["assumptions"].push_back({{"name", it.name},
                                    {"pass", it.pass},
                                    {"value", it.value},
                                    {"detail", it.detail}});
    write_artifact(cfg.out_dir, "curve_report.json", j.dump(2) + "\n",
                   result);
    return {"curve-check", rep.all_pass,
            rep.all_pass ? "all assumptions hold"
                         : "an assumption check failed"};
}

PipelineStatus run_spectrum(const config::RunConfig& cfg, RunResult& result) {
    curve::Curve c = curve::build_curve(cfg.profile, cfg.truncation);
    spectrum::SolverOptions opt;
    opt.order = cfg.order;
    opt.panel_width = 2.0 * cfg.truncation * cfg.order / cfg.grid_n;
    opt.kappa_tol = cfg.kappa_tol;
    auto res = spectrum::find_discrete_eigenvalues(c, cfg.alpha, opt);
    json j;
    j["eigenvalues"] = res.eigenvalues;
    j["kappas"] = res.kappas;
    j["residuals"] = res.residuals;
    j["threshold_marginal"] = res.threshold_marginal;
    j["found"] = res.found();
    write_artifact(cfg.out_dir, "spectrum.json", j.dump(2) + "\n", result);
    std::string detail =
        res.found() ? std::to_string(res.eigenvalues.size()) +
                          " eigenvalue(s) below the essential band"
                    : "no eigenvalue";
    return {"spectrum", true, detail};
}

PipelineStatus run_asymptotics(const config::RunConfig& cfg,
                               RunResult& result) {
    auto fit = spectrum::beta4_fit(cfg.profile, cfg.alpha, cfg.betas);
    CsvWriter csv({"beta", "energy", "ratio"});
    bool ok = !fit.rows.empty();
    for (const auto& r : fit.rows) {
        csv.row(std::vector<double>{r.beta, r.energy, r.ratio});
        ok = ok && r.ok;
    }
    write_artifact(cfg.out_dir, "asymptotics.csv", csv.str(), result);
    json j;
    j["predicted_coeff"] = fit.predicted_coeff;
    j["ratio_spread"] = fit.ratio_spread;
    write_artifact(cfg.out_dir, "asymptotics.json", j.dump(2) + "\n",
                   result);
    return {"asymptotics", ok,
            ok ? "ratio table complete" : "a beta row failed to converge"};
}

PipelineStatus run_lap_scan(const config::RunConfig& cfg, RunResult& result) {
    curve::Curve c = curve::build_curve(cfg.profile, cfg.truncation);
    auto grid = kernel::make_grid(cfg.truncation, cfg.grid_n, cfg.order);
    bump::Bump phi;
    auto scan = lap::lap_scan(c, cfg.alpha, phi, cfg.lambda_min,
                              cfg.lambda_max, grid, cfg.lambda_cells,
                              cfg.eps_ladder);
    CsvWriter csv({"lambda", "eps", "im_matrix_element", "cond", "flag"});
    for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
        for (std::size_t jj = 0; jj < scan.eps_ladder.size(); ++jj) {
            const auto& cell = scan.cell(i, jj);
            csv.row({format_double(cell.lambda), format_double(cell.eps),
                     format_double(cell.im_value), format_double(cell.cond),
                     cell.flagged ? "1" : "0"});
        }
    write_artifact(cfg.out_dir, "lap_scan.csv", csv.str(), result);

    auto sing = lap::detect_singular_set(c, cfg.alpha, cfg.lambda_min,
                                         cfg.lambda_max, grid,
                                         cfg.lambda_cells,
                                         cfg.eps_ladder.back());
    json j;
    j["candidates"] = sing.candidates;
    j["candidates_10x"] = sing.candidates_10x;
    j["candidates_30x"] = sing.candidates_30x;
    j["median_cond"] = sing.median_cond;
    j["eps"] = sing.eps;
    j["threshold"] = sing.threshold;
    write_artifact(cfg.out_dir, "singular_set.json", j.dump(2) + "\n",
                   result);

    bool ok = true;
    std::size_t converged = 0;
    for (auto st : scan.cauchy) {
        if (st == lap::CauchyStatus::failed) ok = false;
        if (st == lap::CauchyStatus::converged) ++converged;
    }
    return {"lap-scan", ok,
            std::to_string(converged) + "/" +
                std::to_string(scan.cauchy.size()) +
                " columns Cauchy-contracting, " +
                std::to_string(sing.candidates.size()) +
                " singular candidate(s)"};
}

PipelineStatus run_quasimode(const config::RunConfig& cfg,
                             RunResult& result) {
    // the refinement rung needs reach 2 s0 + 4 L1 + margin; widen the
    // cached curve window accordingly
    const double reach = 2.0 * cfg.qm_s0 + 4.0 * cfg.qm_l1 + 6.0;
    curve::Curve c =
        curve::build_curve(cfg.profile, std::max(cfg.truncation, reach));
    CsvWriter csv({"s0", "L1", "L2", "k", "ratio", "bound"});
    bool ok = true;
    for (double k : cfg.qm_ks) {
        // base window and the refinement ladder step
        for (int rung = 0; rung < 2; ++rung) {
            const double s0 = rung ? 2.0 * cfg.qm_s0 : cfg.qm_s0;
            const double l1 = rung ? 4.0 * cfg.qm_l1 : cfg.qm_l1;
            const double l2 = rung ? 2.0 * cfg.qm_l2 : cfg.qm_l2;
            auto mode =
                quasimode::build_quasimode(c, cfg.alpha, k, s0, l1, l2);
            auto rep = quasimode::residual_ratio(mode, c, cfg.alpha, k);
            csv.row(std::vector<double>{mode.s0, l1, l2, k, rep.ratio,
                                        rep.bound});
            ok = ok && rep.within_bound;
        }
    }
    write_artifact(cfg.out_dir, "quasimode.csv", csv.str(), result);
    return {"quasimode", ok,
            ok ? "all residual ratios within the envelope"
                 : "a residual ratio exceeded its envelope"};
}

PipelineStatus run_scatter_checks(const config::RunConfig& cfg,
                                  RunResult& result) {
    curve::Curve c = curve::build_curve(cfg.profile, cfg.truncation);
    auto grid = kernel::make_grid(cfg.truncation, cfg.grid_n, cfg.order);
    auto tb = wave::trace_bound_integrals(c, cfg.alpha, cfg.wave_kappa, grid);
    json j;
    j["kappa"] = tb.kappa;
    j["rho"] = tb.rho;
    j["kernel_h1"] = tb.kernel_h1;
    j["kernel_plus_h1"] = tb.kernel_plus_h1;
    j["operators"] = json::object();
    bool ok = tb.kernel_h1 < 1.0 && tb.kernel_plus_h1 < 1.0;
    for (const auto& op : tb.ops) {
        j["operators"][op.name] = {{"bound_value", op.value},
                                   {"ladder_delta", op.ladder_delta},
                                   {"stable", op.stable}};
        ok = ok && op.stable && std::isfinite(op.value);
    }
    write_artifact(cfg.out_dir, "wave_report.json", j.dump(2) + "\n",
                   result);

    auto table = wave::free_decay(cfg.decay_eps1, cfg.decay_a, cfg.alpha,
                                  cfg.decay_times);
    CsvWriter csv({"t", "norm", "scaled"});
    for (const auto& row : table.rows) {
        csv.row(std::vector<double>{row.t, row.norm, row.scaled});
        ok = ok && row.quadrature_ok;
    }
    write_artifact(cfg.out_dir, "decay.csv", csv.str(), result);
    return {"scatter-checks", ok,
            ok ? "trace bounds stable, decay table converged"
               : "a trace bound or decay row failed"};
}

}  // namespace

RunResult run_pipelines(const config::RunConfig& cfg) {
    cfg.validate();
    RunResult result;
    for (const auto& name : cfg.pipelines) {
        PipelineStatus status{name, false, ""};
        try {
            if (name == "curve-check")
                status = run_curve_check(cfg, result);
            else if (name == "spectrum")
                status = run_spectrum(cfg, result);
            else if (name == "asymptotics")
                status = run_asymptotics(cfg, result);
            else if (name == "lap-scan")
                status = run_lap_scan(cfg, result);
            else if (name == "quasimode")
                status = run_quasimode(cfg, result);
            else if (name == "scatter-checks")
                status = run_scatter_checks(cfg, result);
            else
                status.detail = "unknown pipeline";
        } catch (const std::exception& e) {
            status.ok = false;
            status.detail = std::string("error: ") + e.what();
        }
        result.pipelines.push_back(status);
    }
    result.all_ok = !result.pipelines.empty();
    for (const auto& p : result.pipelines)
        result.all_ok = result.all_ok && p.ok;

    json manifest;
    manifest["artifacts"] = json::array();
    for (const auto& a : result.artifacts)
        manifest["artifacts"].push_back({{"name", a.name},
                                         {"checksum", a.checksum},
                                         {"bytes", a.bytes}});
    manifest["pipelines"] = json::array();
    for (const auto& p : result.pipelines)
        manifest["pipelines"].push_back(
            {{"name", p.name}, {"ok", p.ok}, {"detail", p.detail}});
    manifest["all_ok"] = result.all_ok;
    // the manifest lists every other artifact; it is written last and
    // records its own name without a self-referential checksum
    RunResult scratch;
    write_artifact(cfg.out_dir, "manifest.json", manifest.dump(2) + "\n",
                   scratch);
    return result;
}

}  // namespace lqw::report

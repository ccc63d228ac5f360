#include "lqw/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lqw::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw std::invalid_argument("config: " + where + ": " + msg);
}

double to_double(const std::string& where, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) fail(where, "trailing characters in '" + v + "'");
        return x;
    } catch (const std::invalid_argument&) {
        fail(where, "not a number: '" + v + "'");
    } catch (const std::out_of_range&) {
        fail(where, "out of range: '" + v + "'");
    }
}

int to_int(const std::string& where, const std::string& v) {
    const double x = to_double(where, v);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x) fail(where, "not an integer: '" + v + "'");
    return i;
}

std::vector<double> to_list(const std::string& where, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(where, item));
    }
    if (out.empty()) fail(where, "empty list");
    return out;
}

}  // namespace

const std::vector<std::string>& pipeline_order() {
    static const std::vector<std::string> order = {
        "curve-check", "spectrum",  "asymptotics",
        "lap-scan",    "quasimode", "scatter-checks"};
    return order;
}

bool RunConfig::has_pipeline(const std::string& name) const {
    return std::find(pipelines.begin(), pipelines.end(), name) !=
           pipelines.end();
}

void RunConfig::validate() const {
    profile.validate();
    if (!(alpha > 0.0)) fail("physics.alpha", "must be > 0");
    if (!(truncation > 0.0)) fail("numerics.truncation", "must be > 0");
    if (grid_n < 8) fail("numerics.grid_n", "must be >= 8");
    if (order < 2 || order > 48) fail("numerics.order", "must be in [2,48]");
    if (!(kappa_tol > 0.0)) fail("numerics.kappa_tol", "must be > 0");
    if (eps_ladder.empty()) fail("numerics.eps_ladder", "must be nonempty");
    for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
        if (!(eps_ladder[i] > 0.0))
            fail("numerics.eps_ladder", "entries must be > 0");
        if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
            fail("numerics.eps_ladder", "must be strictly decreasing");
    }
    if (lambda_cells < 1) fail("numerics.lambda_cells", "must be >= 1");
    if (!(lambda_min < lambda_max))
        fail("numerics.lambda_min", "window must satisfy lambda_min < lambda_max");
    if (has_pipeline("lap-scan")) {
        const double threshold = -0.25 * alpha * alpha;
        if (!(lambda_min > threshold && lambda_max < 0.0))
            fail("numerics.lambda_min",
                 "lap window must lie inside (-alpha^2/4, 0)");
    }
    for (double b : betas)
        if (!(b > 0.0 && b <= 1.0))
            fail("numerics.betas", "entries must be in (0, 1]");
    if (!(qm_l1 > 0.0 && qm_l2 > 0.0))
        fail("numerics.quasimode_l1", "plateau lengths must be > 0");
    if (!(wave_kappa > 0.0)) fail("numerics.wave_kappa", "must be > 0");
    if (!(decay_eps1 > 0.0 && decay_eps1 < decay_a &&
          decay_a <= 0.5 * alpha))
        fail("numerics.decay_eps1",
             "need 0 < eps1 < a <= alpha/2 for the momentum window");
    for (double t : decay_times)
        if (!(t > 0.0)) fail("numerics.decay_times", "entries must be > 0");
    for (const auto& p : pipelines)
        if (std::find(pipeline_order().begin(), pipeline_order().end(), p) ==
            pipeline_order().end())
            fail("pipelines.run", "unknown pipeline '" + p + "'");
    if (out_dir.empty()) fail("output.dir", "must be nonempty");
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    std::vector<std::string> custom_s_keys;  // keep table keys ordered
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') fail(where, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(where, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const std::string loc = section + "." + key;

        if (section == "curve") {
            if (key == "family")
                cfg.profile.family = curve::family_from_string(val);
            else if (key == "theta")
                cfg.profile.theta = to_double(loc, val);
            else if (key == "sigma")
                cfg.profile.sigma = to_double(loc, val);
            else if (key == "center")
                cfg.profile.center = to_double(loc, val);
            else if (key == "beta")
                cfg.profile.beta = to_double(loc, val);
            else if (key == "table_s")
                cfg.profile.table_s = to_list(loc, val);
            else if (key == "table_phi")
                cfg.profile.table_phi = to_list(loc, val);
            else
                fail(loc, "unknown key");
        } else if (section == "physics") {
            if (key == "alpha")
                cfg.alpha = to_double(loc, val);
            else
                fail(loc, "unknown key");
        } else if (section == "numerics") {
            if (key == "truncation")
                cfg.truncation = to_double(loc, val);
            else if (key == "grid_n")
                cfg.grid_n = to_int(loc, val);
            else if (key == "order")
                cfg.order = to_int(loc, val);
            else if (key == "kappa_tol")
                cfg.kappa_tol = to_double(loc, val);
            else if (key == "eps_ladder")
                cfg.eps_ladder = to_list(loc, val);
            else if (key == "lambda_min")
                cfg.lambda_min = to_double(loc, val);
            else if (key == "lambda_max")
                cfg.lambda_max = to_double(loc, val);
            else if (key == "lambda_cells")
                cfg.lambda_cells = to_int(loc, val);
            else if (key == "betas")
                cfg.betas = to_list(loc, val);
            else if (key == "quasimode_s0")
                cfg.qm_s0 = to_double(loc, val);
            else if (key == "quasimode_l1")
                cfg.qm_l1 = to_double(loc, val);
            else if (key == "quasimode_l2")
                cfg.qm_l2 = to_double(loc, val);
            else if (key == "quasimode_ks")
                cfg.qm_ks = to_list(loc, val);
            else if (key == "wave_kappa")
                cfg.wave_kappa = to_double(loc, val);
            else if (key == "decay_eps1")
                cfg.decay_eps1 = to_double(loc, val);
            else if (key == "decay_a")
                cfg.decay_a = to_double(loc, val);
            else if (key == "decay_times")
                cfg.decay_times = to_list(loc, val);
            else
                fail(loc, "unknown key");
        } else if (section == "pipelines") {
            if (key != "run") fail(loc, "unknown key");
            cfg.pipelines.clear();
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                if (item == "all") {
                    cfg.pipelines = pipeline_order();
                    break;
                }
                cfg.pipelines.push_back(item);
            }
        } else if (section == "output") {
            if (key == "dir")
                cfg.out_dir = val;
            else
                fail(loc, "unknown key");
        } else {
            fail(where, "unknown section [" + section + "]");
        }
    }
    // canonical execution order regardless of listing order
    std::vector<std::string> ordered;
    for (const auto& p : pipeline_order())
        if (cfg.has_pipeline(p)) ordered.push_back(p);
    if (ordered.size() == cfg.pipelines.size()) cfg.pipelines = ordered;
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace lqw::config

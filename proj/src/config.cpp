#include "fastscat/config.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace fastscat {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

void parse_vec3(const std::string& v, double out[3], const std::string& key) {
    std::istringstream ss(v);
    std::string tok;
    int i = 0;
    while (std::getline(ss, tok, ',') && i < 3) out[i++] = std::stod(trim(tok));
    if (i != 3)
        throw std::invalid_argument("config: key '" + key + "' expects three comma values");
}

} // namespace

std::vector<int> parse_int_list(const std::string& text, char sep) {
    std::vector<int> out;
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, sep)) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

const std::vector<std::string>& RunConfig::known_keys() {
    static const std::vector<std::string> keys = {
        "mesh.path", "mesh.sphere.radius_m", "mesh.sphere.freq", "medium.frequency_hz",
        "grid.box_edge_lambda", "grid.box_edge_m", "mapping.n_d", "mapping.digits",
        "mapping.svd_cutoff", "mapping.tolerance", "solver.backend", "solver.tolerance",
        "solver.restart", "solver.max_iterations", "parallel.workers",
        "translation.member_cache_min_count", "ml.model_dir", "ml.hidden", "train.classes",
        "train.stage1.samples", "train.stage2.samples", "train.stage1.epoch_cap",
        "train.stage2.epoch_cap", "train.stage1.target", "train.stage2.target",
        "train.stage1.batch_schedule", "train.stage2.batch_schedule", "train.learning_rate",
        "train.allow_partial", "pattern.step_deg", "excitation.direction",
        "excitation.polarization", "output.dir", "cache.dir", "cache.enabled", "seed"};
    return keys;
}

void RunConfig::apply(const std::string& key, const std::string& value) {
    if (key == "mesh.path") mesh_path = value;
    else if (key == "mesh.sphere.radius_m") sphere_radius_m = std::stod(value);
    else if (key == "mesh.sphere.freq") sphere_freq = std::stoi(value);
    else if (key == "medium.frequency_hz") frequency_hz = std::stod(value);
    else if (key == "grid.box_edge_lambda") box_edge_lambda = std::stod(value);
    else if (key == "grid.box_edge_m") box_edge_m = std::stod(value);
    else if (key == "mapping.n_d") n_d = std::stoi(value);
    else if (key == "mapping.digits") digits = std::stoi(value);
    else if (key == "mapping.svd_cutoff") svd_cutoff = std::stod(value);
    else if (key == "mapping.tolerance") mapping_tolerance = std::stod(value);
    else if (key == "solver.backend") backend = value;
    else if (key == "solver.tolerance") tolerance = std::stod(value);
    else if (key == "solver.restart") restart = std::stoi(value);
    else if (key == "solver.max_iterations") max_iterations = std::stoi(value);
    else if (key == "parallel.workers") workers = std::stoi(value);
    else if (key == "translation.member_cache_min_count") member_cache_min_count = std::stoi(value);
    else if (key == "ml.model_dir") model_dir = value;
    else if (key == "ml.hidden") hidden = std::stoi(value);
    else if (key == "train.classes") train_classes = value;
    else if (key == "train.stage1.samples") stage1_samples = std::stoi(value);
    else if (key == "train.stage2.samples") stage2_samples = std::stoi(value);
    else if (key == "train.stage1.epoch_cap") stage1_epoch_cap = std::stoi(value);
    else if (key == "train.stage2.epoch_cap") stage2_epoch_cap = std::stoi(value);
    else if (key == "train.stage1.target") stage1_target = std::stod(value);
    else if (key == "train.stage2.target") stage2_target = std::stod(value);
    else if (key == "train.stage1.batch_schedule") batch_schedule1 = value;
    else if (key == "train.stage2.batch_schedule") batch_schedule2 = value;
    else if (key == "train.learning_rate") learning_rate = std::stod(value);
    else if (key == "train.allow_partial") allow_partial = parse_bool(value, key);
    else if (key == "pattern.step_deg") pattern_step_deg = std::stod(value);
    else if (key == "excitation.direction") parse_vec3(value, direction, key);
    else if (key == "excitation.polarization") parse_vec3(value, polarization, key);
    else if (key == "output.dir") output_dir = value;
    else if (key == "cache.dir") cache_dir = value;
    else if (key == "cache.enabled") cache_enabled = parse_bool(value, key);
    else if (key == "seed") seed = std::stoull(value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig RunConfig::from_file(const std::string& path,
                               const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: " + path + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        cfg.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: override '" + ov + "' must be key=value");
        cfg.apply(trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::from_overrides(const std::vector<std::string>& overrides) {
    RunConfig cfg;
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: override '" + ov + "' must be key=value");
        cfg.apply(trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    if (frequency_hz <= 0.0) throw std::invalid_argument("config: medium.frequency_hz must be > 0");
    if (box_edge() <= 0.0) throw std::invalid_argument("config: grid.box_edge must be > 0");
    if (mesh_path.empty() && sphere_radius_m <= 0.0)
        throw std::invalid_argument("config: set mesh.path or mesh.sphere.radius_m");
    if (backend != "dgfa" && backend != "ml" && backend != "dense")
        throw std::invalid_argument("config: solver.backend must be dgfa, ml or dense");
    if (tolerance <= 0.0) throw std::invalid_argument("config: solver.tolerance must be > 0");
    if (restart < 1) throw std::invalid_argument("config: solver.restart must be >= 1");
    if (max_iterations < 1)
        throw std::invalid_argument("config: solver.max_iterations must be >= 1");
    if (workers < 1) throw std::invalid_argument("config: parallel.workers must be >= 1");
    if (n_d < 0) throw std::invalid_argument("config: mapping.n_d must be >= 0");
    if (n_d == 0 && digits < 1)
        throw std::invalid_argument("config: mapping.digits must be >= 1 when mapping.n_d = 0");
    if (hidden < 1) throw std::invalid_argument("config: ml.hidden must be >= 1");
    if (pattern_step_deg <= 0.0)
        throw std::invalid_argument("config: pattern.step_deg must be > 0");
}

double RunConfig::wavelength() const { return kSpeedOfLight / frequency_hz; }

double RunConfig::box_edge() const {
    return box_edge_m > 0.0 ? box_edge_m : box_edge_lambda * wavelength();
}

SolverBackend RunConfig::solver_backend() const {
    if (backend == "dgfa") return SolverBackend::dgfa;
    if (backend == "ml") return SolverBackend::ml;
    return SolverBackend::dense_oracle;
}

PipelineOptions RunConfig::pipeline_options() const {
    PipelineOptions opt;
    opt.box_edge = box_edge();
    opt.n_d = n_d > 0 ? n_d
                      : select_dipole_count(medium().wavenumber * box_edge(), digits);
    opt.svd_cutoff = svd_cutoff;
    opt.backend = solver_backend();
    opt.workers = workers;
    opt.member_cache_min_count = member_cache_min_count;
    return opt;
}

GmresOptions RunConfig::gmres_options() const {
    GmresOptions opt;
    opt.tolerance = tolerance;
    opt.restart = restart;
    opt.max_iterations = max_iterations;
    return opt;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig cfg;
    cfg.hidden = hidden;
    cfg.learning_rate = learning_rate;
    cfg.seed = seed;
    cfg.stage1.samples = stage1_samples;
    cfg.stage2.samples = stage2_samples;
    cfg.stage1.epoch_cap = stage1_epoch_cap;
    cfg.stage2.epoch_cap = stage2_epoch_cap;
    cfg.stage1.target = stage1_target;
    cfg.stage2.target = stage2_target;
    cfg.stage1.batch_schedule = parse_int_list(batch_schedule1);
    cfg.stage2.batch_schedule = parse_int_list(batch_schedule2);
    if (cfg.stage1.batch_schedule.empty() || cfg.stage2.batch_schedule.empty())
        throw std::invalid_argument("config: batch schedules must be non-empty");
    return cfg;
}

std::vector<Eigen::Vector3i> RunConfig::parse_train_classes() const {
    std::vector<Eigen::Vector3i> classes;
    if (train_classes == "occupied") return classes;
    std::istringstream ss(train_classes);
    std::string group;
    while (std::getline(ss, group, ';')) {
        const std::vector<int> v = parse_int_list(group);
        if (v.size() != 3)
            throw std::invalid_argument("config: train.classes entries need three components");
        classes.emplace_back(v[0], v[1], v[2]);
    }
    return classes;
}

TriangleMesh RunConfig::make_mesh() const {
    if (!mesh_path.empty()) return load_mesh(mesh_path);
    return make_icosphere(sphere_radius_m, sphere_freq);
}

// Canonical dump of the result-determining keys; output/cache locations
// are deliberately excluded so the hash identifies the computation.
std::string RunConfig::canonical_text() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "excitation.direction = " << direction[0] << "," << direction[1] << ","
       << direction[2] << "\n";
    os << "excitation.polarization = " << polarization[0] << "," << polarization[1] << ","
       << polarization[2] << "\n";
    os << "grid.box_edge_lambda = " << box_edge_lambda << "\n";
    os << "grid.box_edge_m = " << box_edge_m << "\n";
    os << "mapping.digits = " << digits << "\n";
    os << "mapping.n_d = " << n_d << "\n";
    os << "mapping.svd_cutoff = " << svd_cutoff << "\n";
    os << "mapping.tolerance = " << mapping_tolerance << "\n";
    os << "medium.frequency_hz = " << frequency_hz << "\n";
    os << "mesh.path = " << mesh_path << "\n";
    os << "mesh.sphere.freq = " << sphere_freq << "\n";
    os << "mesh.sphere.radius_m = " << sphere_radius_m << "\n";
    os << "ml.hidden = " << hidden << "\n";
    os << "parallel.workers = " << workers << "\n";
    os << "pattern.step_deg = " << pattern_step_deg << "\n";
    os << "seed = " << seed << "\n";
    os << "solver.backend = " << backend << "\n";
    os << "solver.max_iterations = " << max_iterations << "\n";
    os << "solver.restart = " << restart << "\n";
    os << "solver.tolerance = " << tolerance << "\n";
    os << "train.allow_partial = " << (allow_partial ? "true" : "false") << "\n";
    os << "train.classes = " << train_classes << "\n";
    os << "train.learning_rate = " << learning_rate << "\n";
    os << "train.stage1.batch_schedule = " << batch_schedule1 << "\n";
    os << "train.stage1.epoch_cap = " << stage1_epoch_cap << "\n";
    os << "train.stage1.samples = " << stage1_samples << "\n";
    os << "train.stage1.target = " << stage1_target << "\n";
    os << "train.stage2.batch_schedule = " << batch_schedule2 << "\n";
    os << "train.stage2.epoch_cap = " << stage2_epoch_cap << "\n";
    os << "train.stage2.samples = " << stage2_samples << "\n";
    os << "train.stage2.target = " << stage2_target << "\n";
    os << "translation.member_cache_min_count = " << member_cache_min_count << "\n";
    return os.str();
}

std::string RunConfig::hash() const {
    // FNV-1a over the canonical text.
    const std::string text = canonical_text();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

} // namespace fastscat

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "romlab/dlrom.hpp"
#include "romlab/errors.hpp"
#include "romlab/fem.hpp"
#include "romlab/random_fields.hpp"
#include "romlab/reduction.hpp"
#include "romlab/solvers.hpp"

namespace romlab {

// ---------------------------------------------------------------------------
// configuration: flat key-value text, dotted keys, unknown keys rejected
// ---------------------------------------------------------------------------

enum class ProblemKind { darcy, burgers, cookie };

inline std::string to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::darcy: return "darcy";
        case ProblemKind::burgers: return "burgers";
        case ProblemKind::cookie: return "cookie";
    }
    return "?";
}

struct StudyConfig {
    ProblemKind problem = ProblemKind::darcy;
    int mesh_n_div = 30;           // darcy / cookie
    int grid_n_cells = 500;        // burgers
    double grid_length = 5.0;
    int snapshot_count = 1000;
    double train_fraction = 0.9;
    int kl_modes = 0;              // 0 = keep all
    int ic_terms = 200;            // series truncation of the 1D initial data
    double field_length_scale = 1.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<int> sweep_dims = {1, 2, 3, 4, 5, 6};
    int table1_dim = 16;
    TrainConfig train;
    bool alphas_set = false;       // whether the config file pinned the loss weights
    std::string out_dir = "out";
    int jobs = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw config_error("config: bad numeric value for " + key + ": '" + value + "'");
    }
}

inline long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw config_error("config: bad integer value for " + key + ": '" + value + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw config_error("config: bad unsigned value for " + key + ": '" + value + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw config_error("config: bad boolean value for " + key + ": '" + value + "'");
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<int>(parse_int(key, item)));
    }
    if (out.empty()) throw config_error("config: empty list for " + key);
    return out;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a64(s.data(), s.size(), h);
}

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline StudyConfig parse_config_text(const std::string& text) {
    StudyConfig cfg;
    bool any_alpha = false;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) + " is not key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (value.empty()) throw config_error("config: empty value for " + key);

        if (key == "problem.kind") {
            if (value == "darcy") cfg.problem = ProblemKind::darcy;
            else if (value == "burgers") cfg.problem = ProblemKind::burgers;
            else if (value == "cookie") cfg.problem = ProblemKind::cookie;
            else throw config_error("config: unknown problem.kind '" + value + "'");
        } else if (key == "mesh.n_div") {
            cfg.mesh_n_div = static_cast<int>(detail::parse_int(key, value));
        } else if (key == "grid.n_cells") {
            cfg.grid_n_cells = static_cast<int>(detail::parse_int(key, value));
        } else if (key == "grid.length") {
            cfg.grid_length = detail::parse_double(key, value);
        } else if (key == "snapshots.count") {
            cfg.snapshot_count = static_cast<int>(detail::parse_int(key, value));
        } else if (key == "snapshots.train_fraction") {
            cfg.train_fraction = detail::parse_double(key, value);
        } else if (key == "snapshots.kl_modes") {
            cfg.kl_modes = static_cast<int>(detail::parse_int(key, value));
        } else if (key == "snapshots.ic_terms") {
            cfg.ic_terms = static_cast<int>(detail::parse_int(key, value));
        } else if (key == "field.length_scale") {
            cfg.field_length_scale = detail::parse_double(key, value);
        } else if (key == "seed") {
            cfg.seed = detail::parse_u64(key, value);
            cfg.seed_set = true;
        } else if (key == "sweep.latent_dims") {
            cfg.sweep_dims = detail::parse_int_list(key, value);
        } else if (key == "table1.latent_dim") {
            cfg.table1_dim = static_cast<int>(detail::parse_int(key, value));
        } else if (key == "train.epochs") {
            cfg.train.epochs = static_cast<int>(detail::parse_int(key, value));
        } else if (key == "train.lr") {
            cfg.train.lr = detail::parse_double(key, value);
        } else if (key == "train.batch") {
            cfg.train.batch = static_cast<int>(detail::parse_int(key, value));
        } else if (key == "train.weight_decay") {
            cfg.train.weight_decay = detail::parse_double(key, value);
        } else if (key == "train.alpha1") {
            cfg.train.alpha1 = detail::parse_double(key, value);
            any_alpha = true;
        } else if (key == "train.alpha2") {
            cfg.train.alpha2 = detail::parse_double(key, value);
            any_alpha = true;
        } else if (key == "train.alpha3") {
            cfg.train.alpha3 = detail::parse_double(key, value);
            any_alpha = true;
        } else if (key == "train.rel_first_term") {
            cfg.train.rel_first_term = detail::parse_bool(key, value);
            any_alpha = true;
        } else if (key == "output.dir") {
            cfg.out_dir = value;
        } else {
            throw config_error("config: unknown key '" + key + "'");
        }
    }
    cfg.alphas_set = any_alpha;
    return cfg;
}

inline StudyConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("config: cannot open " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

inline void validate_config(const StudyConfig& cfg) {
    if (!cfg.seed_set) throw config_error("config: seed is mandatory");
    if (cfg.snapshot_count < 2) throw config_error("config: snapshots.count must be >= 2");
    if (cfg.train_fraction <= 0.0 || cfg.train_fraction >= 1.0)
        throw config_error("config: snapshots.train_fraction must lie in (0, 1)");
    if (cfg.mesh_n_div < 1) throw config_error("config: mesh.n_div must be >= 1");
    if (!(cfg.field_length_scale > 0.0))
        throw config_error("config: field.length_scale must be positive");
    if (cfg.grid_n_cells < 1) throw config_error("config: grid.n_cells must be >= 1");
    if (cfg.table1_dim < 1) throw config_error("config: table1.latent_dim must be >= 1");
    for (std::size_t i = 0; i < cfg.sweep_dims.size(); ++i) {
        if (cfg.sweep_dims[i] < 1) throw config_error("config: sweep.latent_dims must be positive");
        if (i > 0 && cfg.sweep_dims[i] <= cfg.sweep_dims[i - 1])
            throw config_error("config: sweep.latent_dims must be strictly ascending");
    }
    cfg.train.validate();
}

// hash of the resolved configuration; identical configs give identical
// output headers regardless of key order or comments in the file
inline std::uint64_t config_hash(const StudyConfig& cfg) {
    std::ostringstream os;
    os << "problem.kind=" << to_string(cfg.problem) << "\n"
       << "mesh.n_div=" << cfg.mesh_n_div << "\n"
       << "grid.n_cells=" << cfg.grid_n_cells << "\n"
       << "grid.length=" << detail::format_g17(cfg.grid_length) << "\n"
       << "snapshots.count=" << cfg.snapshot_count << "\n"
       << "snapshots.train_fraction=" << detail::format_g17(cfg.train_fraction) << "\n"
       << "snapshots.kl_modes=" << cfg.kl_modes << "\n"
       << "snapshots.ic_terms=" << cfg.ic_terms << "\n"
       << "field.length_scale=" << detail::format_g17(cfg.field_length_scale) << "\n"
       << "seed=" << cfg.seed << "\n"
       << "table1.latent_dim=" << cfg.table1_dim << "\n"
       << "train.epochs=" << cfg.train.epochs << "\n"
       << "train.lr=" << detail::format_g17(cfg.train.lr) << "\n"
       << "train.batch=" << cfg.train.batch << "\n"
       << "train.weight_decay=" << detail::format_g17(cfg.train.weight_decay) << "\n"
       << "train.alpha1=" << detail::format_g17(cfg.train.alpha1) << "\n"
       << "train.alpha2=" << detail::format_g17(cfg.train.alpha2) << "\n"
       << "train.alpha3=" << detail::format_g17(cfg.train.alpha3) << "\n"
       << "train.rel_first_term=" << (cfg.train.rel_first_term ? 1 : 0) << "\n"
       << "alphas_set=" << (cfg.alphas_set ? 1 : 0) << "\n";
    os << "sweep.latent_dims=";
    for (std::size_t i = 0; i < cfg.sweep_dims.size(); ++i)
        os << (i ? "," : "") << cfg.sweep_dims[i];
    os << "\n";
    return detail::fnv1a64(os.str());
}

// ---------------------------------------------------------------------------
// snapshot files: magic "LDSN", version u32, rows u64, cols u64,
// config hash u64, seed u64, then row-major little-endian f64 payload
// ---------------------------------------------------------------------------

inline void write_snapshot_matrix(const std::string& path, const Matrix& data,
                                  std::uint64_t hash, std::uint64_t seed) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("write_snapshot_matrix: cannot open " + path);
    os.write("LDSN", 4);
    detail::write_pod<std::uint32_t>(os, 1u);
    detail::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(data.rows()));
    detail::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(data.cols()));
    detail::write_pod<std::uint64_t>(os, hash);
    detail::write_pod<std::uint64_t>(os, seed);
    for (int i = 0; i < data.rows(); ++i)
        for (int j = 0; j < data.cols(); ++j) detail::write_pod<double>(os, data(i, j));
    if (!os) throw config_error("write_snapshot_matrix: write failed for " + path);
}

struct SnapshotFile {
    Matrix data;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

inline SnapshotFile read_snapshot_matrix(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("read_snapshot_matrix: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "LDSN", 4) != 0)
        throw config_error("read_snapshot_matrix: bad magic in " + path);
    const auto version = detail::read_pod<std::uint32_t>(is);
    if (version != 1u) throw config_error("read_snapshot_matrix: unsupported version");
    const auto rows = detail::read_pod<std::uint64_t>(is);
    const auto cols = detail::read_pod<std::uint64_t>(is);
    SnapshotFile file;
    file.config_hash = detail::read_pod<std::uint64_t>(is);
    file.seed = detail::read_pod<std::uint64_t>(is);
    file.data.resize(static_cast<int>(rows), static_cast<int>(cols));
    for (std::uint64_t i = 0; i < rows; ++i)
        for (std::uint64_t j = 0; j < cols; ++j)
            file.data(static_cast<int>(i), static_cast<int>(j)) = detail::read_pod<double>(is);
    return file;
}

inline std::uint64_t file_checksum(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("file_checksum: cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (is.read(buf, sizeof(buf)) || is.gcount() > 0)
        h = detail::fnv1a64(buf, static_cast<std::size_t>(is.gcount()), h);
    return h;
}

// ---------------------------------------------------------------------------
// problem wiring
// ---------------------------------------------------------------------------

struct ProblemContext {
    SymmetricSparseMatrix mass_out;  // V_h inner product of the output space
    SymmetricSparseMatrix mass_in;   // inner product of the input space
    std::function<DLROM(int, std::uint64_t)> make_model;
    std::optional<StructuredTriMesh> mesh;
    std::optional<UniformGrid1D> grid;
};

inline ProblemContext make_problem_context(const StudyConfig& cfg) {
    ProblemContext ctx;
    switch (cfg.problem) {
        case ProblemKind::darcy: {
            StructuredTriMesh mesh = build_unit_square_mesh(cfg.mesh_n_div);
            ctx.mass_out = assemble_mass_matrix(mesh);
            ctx.mass_in = ctx.mass_out;
            ctx.make_model = [mesh](int n, std::uint64_t seed) {
                return make_darcy_model(mesh, n, seed);
            };
            ctx.mesh = std::move(mesh);
            break;
        }
        case ProblemKind::burgers: {
            UniformGrid1D grid = make_grid_1d(cfg.grid_length, cfg.grid_n_cells);
            ctx.mass_out = SymmetricSparseMatrix::diagonal(
                Vector::Constant(grid.n_cells, grid.h()));
            ctx.mass_in = ctx.mass_out;
            ctx.make_model = [grid](int n, std::uint64_t seed) {
                return make_burgers_model(grid, n, seed);
            };
            ctx.grid = grid;
            break;
        }
        case ProblemKind::cookie: {
            StructuredTriMesh mesh = build_unit_square_mesh(cfg.mesh_n_div);
            ctx.mass_out = assemble_mass_matrix(mesh);
            ctx.mass_in = SymmetricSparseMatrix::diagonal(Vector::Ones(3));
            ctx.make_model = [mesh](int n, std::uint64_t seed) {
                return make_cookie_model(mesh, n, seed);
            };
            ctx.mesh = std::move(mesh);
            break;
        }
    }
    return ctx;
}

inline SnapshotSet generate_problem_snapshots(const StudyConfig& cfg) {
    switch (cfg.problem) {
        case ProblemKind::darcy: {
            DarcyProblem problem{build_unit_square_mesh(cfg.mesh_n_div)};
            return generate_darcy_snapshots(problem, cfg.snapshot_count, cfg.seed,
                                            cfg.train_fraction, cfg.kl_modes, cfg.jobs,
                                            cfg.field_length_scale);
        }
        case ProblemKind::burgers: {
            BurgersProblem problem;
            problem.grid = make_grid_1d(cfg.grid_length, cfg.grid_n_cells);
            return generate_burgers_snapshots(problem, cfg.snapshot_count, cfg.seed,
                                              cfg.train_fraction, cfg.ic_terms, cfg.jobs);
        }
        case ProblemKind::cookie: {
            CookieProblem problem{build_unit_square_mesh(cfg.mesh_n_div)};
            return generate_cookie_snapshots(problem, cfg.snapshot_count, cfg.seed,
                                             cfg.train_fraction, cfg.jobs);
        }
    }
    throw config_error("unknown problem kind");
}

// table-defaults for the full 3-term training when the config did not pin
// the loss weights
inline TrainConfig table1_train_config(const StudyConfig& cfg) {
    TrainConfig train = cfg.train;
    train.seed = cfg.seed;
    if (!cfg.alphas_set) {
        switch (cfg.problem) {
            case ProblemKind::darcy:
            case ProblemKind::cookie:
                train.alpha1 = 1.0 / 5.0;
                train.alpha2 = 1.0 / 5.0;
                train.alpha3 = 1.0 / 16.0;
                train.rel_first_term = false;
                break;
            case ProblemKind::burgers:
                train.alpha1 = 1.0;
                train.alpha2 = 1.0;
                train.alpha3 = 1.0 / 16.0;
                train.rel_first_term = true;
                break;
        }
    }
    return train;
}

// ---------------------------------------------------------------------------
// command implementations shared by the CLI and the test suites
// ---------------------------------------------------------------------------

inline std::string snapshots_input_path(const StudyConfig& cfg) {
    return (std::filesystem::path(cfg.out_dir) / "inputs.ldsn").string();
}
inline std::string snapshots_output_path(const StudyConfig& cfg) {
    return (std::filesystem::path(cfg.out_dir) / "outputs.ldsn").string();
}

inline void run_generate(const StudyConfig& cfg, std::ostream& log) {
    validate_config(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    const std::uint64_t hash = config_hash(cfg);
    const SnapshotSet set = generate_problem_snapshots(cfg);
    write_snapshot_matrix(snapshots_input_path(cfg), set.inputs, hash, cfg.seed);
    write_snapshot_matrix(snapshots_output_path(cfg), set.outputs, hash, cfg.seed);
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(file_checksum(snapshots_input_path(cfg))));
    log << "inputs:  " << set.inputs.rows() << " x " << set.inputs.cols()
        << "  checksum " << hex << "\n";
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(file_checksum(snapshots_output_path(cfg))));
    log << "outputs: " << set.outputs.rows() << " x " << set.outputs.cols()
        << "  checksum " << hex << "\n";
    log << "split:   " << set.n_train << " train / " << set.n_test() << " test\n";
}

inline SnapshotSet load_snapshots(const StudyConfig& cfg) {
    const std::string in_path = snapshots_input_path(cfg);
    const std::string out_path = snapshots_output_path(cfg);
    if (!std::filesystem::exists(in_path) || !std::filesystem::exists(out_path))
        throw config_error("snapshots missing under '" + cfg.out_dir + "', run generate first");
    SnapshotFile in = read_snapshot_matrix(in_path);
    SnapshotFile out = read_snapshot_matrix(out_path);
    if (in.data.rows() != out.data.rows())
        throw config_error("snapshot files disagree on the sample count");
    SnapshotSet set;
    set.inputs = std::move(in.data);
    set.outputs = std::move(out.data);
    set.n_train = detail::train_count(static_cast<int>(set.inputs.rows()), cfg.train_fraction);
    set.seed = in.seed;
    return set;
}

namespace detail {

inline std::string slope_or_absent(const std::optional<LogLogFit>& fit) {
    return fit ? format_g17(fit->slope) : std::string("absent");
}

}  // namespace detail

inline ErrorDecayReport run_sweep(const StudyConfig& cfg, std::ostream& log) {
    validate_config(cfg);
    const std::uint64_t hash = config_hash(cfg);
    const SnapshotSet set = load_snapshots(cfg);
    ProblemContext ctx = make_problem_context(cfg);

    TrainConfig train = cfg.train;
    train.seed = cfg.seed;
    const std::uint64_t model_seed = mix_seed(cfg.seed, 0x6d6f64656cULL);
    ErrorDecayReport report =
        latent_sweep(set, ctx.mass_out, ctx.mass_in,
                     [&](int n) { return ctx.make_model(n, mix_seed(model_seed, n)); },
                     cfg.sweep_dims, train);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));

    {
        std::ofstream os(fs::path(cfg.out_dir) / "report.csv");
        os << "# romlab sweep format=1 config=" << hex << " seed=" << cfg.seed << "\n";
        os << "n,e_ae,e_pod,sqrt_tail_mu,sqrt_tail_u\n";
        for (const auto& r : report.rows)
            os << r.n << "," << detail::format_g17(r.e_ae) << "," << detail::format_g17(r.e_pod)
               << "," << detail::format_g17(r.sqrt_tail_mu) << ","
               << detail::format_g17(r.sqrt_tail_u) << "\n";
        os << "# beta_ae=" << detail::slope_or_absent(report.beta_ae)
           << " beta_pod=" << detail::slope_or_absent(report.beta_pod)
           << " beta_mu=" << detail::slope_or_absent(report.beta_mu)
           << " beta_u=" << detail::slope_or_absent(report.beta_u) << "\n";
    }
    {
        std::ofstream os(fs::path(cfg.out_dir) / "spectrum.csv");
        os << "# romlab spectrum format=1 config=" << hex << " seed=" << cfg.seed << "\n";
        os << "i,lambda_mu,lambda_u\n";
        const int rows = static_cast<int>(std::max(report.lambda_mu.size(), report.lambda_u.size()));
        for (int i = 0; i < rows; ++i) {
            os << (i + 1) << ",";
            if (i < report.lambda_mu.size()) os << detail::format_g17(report.lambda_mu[i]);
            os << ",";
            if (i < report.lambda_u.size()) os << detail::format_g17(report.lambda_u[i]);
            os << "\n";
        }
    }
    {
        std::ofstream os(fs::path(cfg.out_dir) / "eigenfunction_norms.csv");
        os << "# romlab eigenfunction sup norms format=1 config=" << hex << " seed=" << cfg.seed
           << "\n";
        os << "i,linf_norm_phi_i\n";
        for (int i = 0; i < report.input_mode_sup_norms.size(); ++i)
            os << (i + 1) << "," << detail::format_g17(report.input_mode_sup_norms[i]) << "\n";
    }

    log << "sweep complete over " << report.rows.size() << " latent dimensions\n";
    log << "  beta_ae=" << detail::slope_or_absent(report.beta_ae)
        << " beta_pod=" << detail::slope_or_absent(report.beta_pod)
        << " beta_mu=" << detail::slope_or_absent(report.beta_mu)
        << " beta_u=" << detail::slope_or_absent(report.beta_u) << "\n";
    return report;
}

struct Table1Result {
    double pod_percent = 0.0;
    double ae_percent = 0.0;
    double dlrom_percent = 0.0;
    bool rank_limited = false;
};

inline Table1Result run_table1(const StudyConfig& cfg, std::ostream& log) {
    validate_config(cfg);
    const std::uint64_t hash = config_hash(cfg);
    const SnapshotSet set = load_snapshots(cfg);
    ProblemContext ctx = make_problem_context(cfg);
    const int n = cfg.table1_dim;

    const int max_rank = std::min<int>(set.n_train, static_cast<int>(set.outputs.cols()));
    if (n > max_rank) throw config_error("table1: latent dimension exceeds snapshot rank bound");

    const PODBasis basis = pod(set.train_outputs(), ctx.mass_out, n);
    if (basis.rank_limited)
        log << "warning: requested n exceeds the numerical snapshot rank, basis truncated\n";
    const ProjectionError pod_err = pod_projection_error(basis, set.test_outputs(), ctx.mass_out);

    TrainConfig train = table1_train_config(cfg);
    DLROM model = ctx.make_model(n, mix_seed(cfg.seed, 0x7461626c65ULL));
    train.seed = cfg.seed;
    romlab::train(model, set, ctx.mass_out, train);

    const TestError ae = test_error_ae(model, set.test_outputs(), ctx.mass_out);
    const TestError rom = test_error_rom(model, set.test_inputs(), set.test_outputs(), ctx.mass_out);

    // aggregate normalization: finite even when the sample law contains
    // zero fields (the clamped 1D initial data does)
    Table1Result result;
    result.pod_percent = 100.0 * pod_err.relative_aggregate;
    result.ae_percent = 100.0 * ae.relative_aggregate;
    result.dlrom_percent = 100.0 * rom.relative_aggregate;
    result.rank_limited = basis.rank_limited;

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    {
        std::ofstream os(fs::path(cfg.out_dir) / "table1.csv");
        os << "# romlab table1 format=1 config=" << hex << " seed=" << cfg.seed << "\n";
        os << "problem,n,pod_percent,ae_percent,dlrom_percent\n";
        os << to_string(cfg.problem) << "," << n << "," << detail::format_g17(result.pod_percent)
           << "," << detail::format_g17(result.ae_percent) << ","
           << detail::format_g17(result.dlrom_percent) << "\n";
    }

    // trained model alongside the table
    save_dlrom(model, (fs::path(cfg.out_dir) / "model").string(), hash);

    log << "problem " << to_string(cfg.problem) << ", n = " << n << "\n";
    char line[160];
    std::snprintf(line, sizeof(line), "  POD %.2f%%  AE %.2f%%  DL-ROM %.2f%%\n",
                  result.pod_percent, result.ae_percent, result.dlrom_percent);
    log << line;
    return result;
}

}  // namespace romlab

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "romlab/errors.hpp"
#include "romlab/fem.hpp"
#include "romlab/mesh.hpp"
#include "romlab/neural.hpp"
#include "romlab/reduction.hpp"
#include "romlab/rng.hpp"
#include "romlab/solvers.hpp"

namespace romlab {

// encoder N_h -> n, decoder n -> N_h, reduced map d_in -> n
struct DLROM {
    Network encoder;
    Network decoder;
    Network reduced_map;
    int latent_dim = 0;

    void validate() const {
        encoder.validate();
        decoder.validate();
        reduced_map.validate();
        if (encoder.output_width() != latent_dim || decoder.input_width() != latent_dim ||
            reduced_map.output_width() != latent_dim)
            throw config_error("DLROM: latent widths do not agree across networks");
        if (encoder.input_width() != decoder.output_width())
            throw config_error("DLROM: encoder input and decoder output widths differ");
    }
};

struct TrainConfig {
    double alpha1 = 0.2;          // ROM misfit weight
    double alpha2 = 0.2;          // autoencoder reconstruction weight
    double alpha3 = 1.0 / 16.0;   // latent consistency weight
    bool rel_first_term = false;  // first term as per-sample relative error
    int epochs = 300;
    double lr = 1e-3;
    int batch = 32;
    std::uint64_t seed = 0;
    double weight_decay = 0.0;

    void validate() const {
        if (alpha1 < 0 || alpha2 < 0 || alpha3 < 0)
            throw config_error("TrainConfig: loss weights must be nonnegative");
        if (alpha1 + alpha2 + alpha3 <= 0.0)
            throw config_error("TrainConfig: at least one loss weight must be positive");
        if (epochs < 1) throw config_error("TrainConfig: epochs must be >= 1");
        if (batch < 1) throw config_error("TrainConfig: batch size must be >= 1");
        if (lr < 0) throw config_error("TrainConfig: learning rate must be nonnegative");
    }
};

struct DLROMGrads {
    NetworkGrads encoder;
    NetworkGrads decoder;
    NetworkGrads reduced_map;
};

struct LossValue {
    double total = 0.0;
    double term_rom = 0.0;
    double term_ae = 0.0;
    double term_latent = 0.0;
    int skipped_rel_samples = 0;
};

namespace detail {

inline NetworkGrads zero_grads_like(const Network& net) {
    NetworkGrads g;
    g.layers.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        g.layers[l].weights = Matrix::Zero(net.layers[l].out_width(), net.layers[l].in_width());
        g.layers[l].bias = Vector::Zero(net.layers[l].out_width());
    }
    return g;
}

}  // namespace detail

// Batch mean of
//   a1 ||u - Psi(phi(mu))||_M^2  +  a2 ||u - Psi(Psi'(u))||_M^2
//                               +  a3 |Psi'(u) - phi(mu)|^2,
// the first two in the V_h norm, the third Euclidean on the latent space.
// With rel_first_term the first term becomes ||u - Psi(phi(mu))||_M / ||u||_M
// per sample; zero-norm samples are skipped. Gradients for all three
// networks come out of the same pass.
inline LossValue dlrom_loss(const DLROM& model, const Matrix& batch_inputs,
                            const Matrix& batch_outputs,
                            const Eigen::SparseMatrix<double>& mass,
                            const TrainConfig& config, DLROMGrads* grads = nullptr) {
    const int b = static_cast<int>(batch_outputs.rows());
    if (batch_inputs.rows() != b) throw config_error("dlrom_loss: batch row counts differ");
    if (batch_outputs.cols() != mass.rows())
        throw config_error("dlrom_loss: output width does not match mass matrix");

    const bool need_phi = config.alpha1 > 0.0 || config.alpha3 > 0.0;
    const bool need_enc = config.alpha2 > 0.0 || config.alpha3 > 0.0;

    LossValue loss;

    ForwardCache cache_enc, cache_phi, cache_ae, cache_rom;
    Matrix z_enc, z_phi, err_ae, merr_ae, err_rom, merr_rom;

    if (need_enc) z_enc = forward(model.encoder, batch_outputs, grads ? &cache_enc : nullptr);
    if (need_phi) z_phi = forward(model.reduced_map, batch_inputs, grads ? &cache_phi : nullptr);

    if (config.alpha2 > 0.0) {
        const Matrix y_ae = forward(model.decoder, z_enc, grads ? &cache_ae : nullptr);
        err_ae = y_ae - batch_outputs;
        merr_ae = (mass * err_ae.transpose()).transpose();
        loss.term_ae = config.alpha2 * err_ae.cwiseProduct(merr_ae).sum() / b;
    }

    Vector rel_scale;  // per-sample 1 / (||err||_M ||u||_M) for the rel variant
    if (config.alpha1 > 0.0) {
        const Matrix y_rom = forward(model.decoder, z_phi, grads ? &cache_rom : nullptr);
        err_rom = y_rom - batch_outputs;
        merr_rom = (mass * err_rom.transpose()).transpose();
        if (!config.rel_first_term) {
            loss.term_rom = config.alpha1 * err_rom.cwiseProduct(merr_rom).sum() / b;
        } else {
            const Matrix mu = (mass * batch_outputs.transpose()).transpose();
            rel_scale = Vector::Zero(b);
            for (int i = 0; i < b; ++i) {
                const double err_norm =
                    std::sqrt(std::max(err_rom.row(i).dot(merr_rom.row(i)), 0.0));
                const double u_norm =
                    std::sqrt(std::max(batch_outputs.row(i).dot(mu.row(i)), 0.0));
                if (u_norm <= 0.0) {
                    ++loss.skipped_rel_samples;
                    continue;
                }
                loss.term_rom += config.alpha1 * err_norm / u_norm / b;
                if (err_norm > 0.0) rel_scale[i] = 1.0 / (err_norm * u_norm);
            }
        }
    }

    if (config.alpha3 > 0.0) {
        const Matrix dz = z_enc - z_phi;
        loss.term_latent = config.alpha3 * dz.squaredNorm() / b;
    }

    loss.total = loss.term_rom + loss.term_ae + loss.term_latent;

    if (!grads) return loss;

    grads->encoder = detail::zero_grads_like(model.encoder);
    grads->decoder = detail::zero_grads_like(model.decoder);
    grads->reduced_map = detail::zero_grads_like(model.reduced_map);

    Matrix up_enc, up_phi;
    if (need_enc) up_enc = Matrix::Zero(b, model.latent_dim);
    if (need_phi) up_phi = Matrix::Zero(b, model.latent_dim);

    if (config.alpha2 > 0.0) {
        const Matrix up_ae = (2.0 * config.alpha2 / b) * merr_ae;
        NetworkGrads dec_grads = backward(model.decoder, cache_ae, up_ae);
        up_enc += dec_grads.input;
        grads->decoder.accumulate(dec_grads);
        grads->decoder.input = Matrix();
    }

    if (config.alpha1 > 0.0) {
        Matrix up_rom;
        if (!config.rel_first_term) {
            up_rom = (2.0 * config.alpha1 / b) * merr_rom;
        } else {
            up_rom = merr_rom;
            for (int i = 0; i < b; ++i) up_rom.row(i) *= config.alpha1 / b * rel_scale[i];
        }
        NetworkGrads dec_grads = backward(model.decoder, cache_rom, up_rom);
        up_phi += dec_grads.input;
        grads->decoder.accumulate(dec_grads);
        grads->decoder.input = Matrix();
    }

    if (config.alpha3 > 0.0) {
        const Matrix dz = (2.0 * config.alpha3 / b) * (z_enc - z_phi);
        up_enc += dz;
        up_phi -= dz;
    }

    if (need_enc) grads->encoder = backward(model.encoder, cache_enc, up_enc);
    if (need_phi) grads->reduced_map = backward(model.reduced_map, cache_phi, up_phi);
    return loss;
}

inline LossValue dlrom_loss(const DLROM& model, const Matrix& batch_inputs,
                            const Matrix& batch_outputs, const SymmetricSparseMatrix& mass,
                            const TrainConfig& config, DLROMGrads* grads = nullptr) {
    return dlrom_loss(model, batch_inputs, batch_outputs, mass.to_eigen(), config, grads);
}

// ---------------------------------------------------------------------------
// training
// ---------------------------------------------------------------------------

// One-shot joint minimization over all three networks with shuffled
// mini-batch Adam. Deterministic for a fixed seed in single-threaded mode.
// Returns the per-epoch loss trace.
inline std::vector<double> train(DLROM& model, const SnapshotSet& snapshots,
                                 const SymmetricSparseMatrix& mass, const TrainConfig& config) {
    config.validate();
    model.validate();
    if (snapshots.n_train < 1) throw config_error("train: empty training split");

    const Eigen::SparseMatrix<double> msp = mass.to_eigen();
    const int n_train = snapshots.n_train;
    const bool use_phi = config.alpha1 > 0.0 || config.alpha3 > 0.0;
    const bool use_enc = config.alpha2 > 0.0 || config.alpha3 > 0.0;

    AdamConfig adam_cfg;
    adam_cfg.lr = config.lr;
    adam_cfg.weight_decay = config.weight_decay;
    AdamState enc_state = AdamState::like(model.encoder, adam_cfg);
    AdamState dec_state = AdamState::like(model.decoder, adam_cfg);
    AdamState phi_state = AdamState::like(model.reduced_map, adam_cfg);

    Rng rng(mix_seed(config.seed, 0x7261696eULL));
    std::vector<int> order(static_cast<std::size_t>(n_train));
    for (int i = 0; i < n_train; ++i) order[static_cast<std::size_t>(i)] = i;

    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(config.epochs));
    long skipped_rel_total = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (int i = n_train - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }

        double epoch_loss = 0.0;
        for (int start = 0; start < n_train; start += config.batch) {
            const int b = std::min(config.batch, n_train - start);
            Matrix bx(b, snapshots.inputs.cols());
            Matrix bu(b, snapshots.outputs.cols());
            for (int k = 0; k < b; ++k) {
                const int idx = order[static_cast<std::size_t>(start + k)];
                bx.row(k) = snapshots.inputs.row(idx);
                bu.row(k) = snapshots.outputs.row(idx);
            }

            DLROMGrads grads;
            const LossValue loss = dlrom_loss(model, bx, bu, msp, config, &grads);
            skipped_rel_total += loss.skipped_rel_samples;
            if (!std::isfinite(loss.total) || loss.total > 1e6)
                throw numerical_error("train: loss diverged at epoch " + std::to_string(epoch) +
                                      " (loss " + std::to_string(loss.total) + ")");

            if (use_enc) adam_step(enc_state, model.encoder, grads.encoder);
            adam_step(dec_state, model.decoder, grads.decoder);
            if (use_phi) adam_step(phi_state, model.reduced_map, grads.reduced_map);

            epoch_loss += loss.total * b;
        }
        trace.push_back(epoch_loss / n_train);
    }

    if (skipped_rel_total > 0)
        std::cerr << "train: warning, skipped " << skipped_rel_total
                  << " zero-norm samples in the relative loss term\n";
    return trace;
}

// ---------------------------------------------------------------------------
// Monte Carlo test-error estimates
// ---------------------------------------------------------------------------

struct TestError {
    double absolute = 0.0;
    double relative = 0.0;            // mean of per-sample ratios, zero-norm samples skipped
    double relative_aggregate = 0.0;  // sum of errors over sum of norms
};

namespace detail {

template <typename DerivedU, typename DerivedY>
TestError mean_vh_error(const Eigen::MatrixBase<DerivedU>& truth,
                        const Eigen::MatrixBase<DerivedY>& approx,
                        const SymmetricSparseMatrix& mass) {
    const int count = static_cast<int>(truth.rows());
    if (count == 0) throw config_error("test_error: empty test split");
    TestError err;
    int rel_count = 0;
    double norm_sum = 0.0, err_sum = 0.0;
    for (int i = 0; i < count; ++i) {
        const Vector diff = (approx.row(i) - truth.row(i)).transpose();
        const double e = vh_norm(mass, diff);
        const double norm_u = vh_norm(mass, truth.row(i).transpose());
        err.absolute += e;
        err_sum += e;
        norm_sum += norm_u;
        if (norm_u > 0.0) {
            err.relative += e / norm_u;
            ++rel_count;
        }
    }
    err.absolute /= count;
    err.relative = rel_count > 0 ? err.relative / rel_count : 0.0;
    err.relative_aggregate = norm_sum > 0.0 ? err_sum / norm_sum : 0.0;
    return err;
}

}  // namespace detail

template <typename Derived>
TestError test_error_ae(const DLROM& model, const Eigen::MatrixBase<Derived>& test_outputs,
                        const SymmetricSparseMatrix& mass) {
    const Matrix u = test_outputs;
    const Matrix rec = forward(model.decoder, forward(model.encoder, u));
    return detail::mean_vh_error(u, rec, mass);
}

template <typename DerivedX, typename DerivedU>
TestError test_error_rom(const DLROM& model, const Eigen::MatrixBase<DerivedX>& test_inputs,
                         const Eigen::MatrixBase<DerivedU>& test_outputs,
                         const SymmetricSparseMatrix& mass) {
    const Matrix u = test_outputs;
    const Matrix pred = forward(model.decoder, forward(model.reduced_map, Matrix(test_inputs)));
    return detail::mean_vh_error(u, pred, mass);
}

template <typename Derived>
TestError test_error_pod(const PODBasis& basis, const Eigen::MatrixBase<Derived>& test_outputs,
                         const SymmetricSparseMatrix& mass) {
    const Matrix u = test_outputs;
    const Matrix mu = (mass.to_eigen() * u.transpose()).transpose();
    const Matrix rec = (mu * basis.modes) * basis.modes.transpose();
    return detail::mean_vh_error(u, rec, mass);
}

// leading-n truncation of a computed basis
inline PODBasis truncate_basis(const PODBasis& basis, int n) {
    if (n < 1 || n > basis.mode_count()) throw config_error("truncate_basis: n out of range");
    PODBasis out;
    out.modes = basis.modes.leftCols(n);
    out.eigenvalues = basis.eigenvalues;
    out.total_energy = basis.total_energy;
    out.rank_limited = basis.rank_limited;
    return out;
}

// ---------------------------------------------------------------------------
// latent sweep
// ---------------------------------------------------------------------------

struct SweepPoint {
    int n = 0;
    double e_ae = 0.0;         // absolute AE test error
    double e_ae_rel = 0.0;
    double e_pod = 0.0;        // absolute POD projection error on the test set
    double e_pod_rel = 0.0;
    double sqrt_tail_mu = 0.0;
    double sqrt_tail_u = 0.0;
};

struct ErrorDecayReport {
    std::vector<SweepPoint> rows;
    std::optional<LogLogFit> beta_ae, beta_pod, beta_mu, beta_u;
    Vector lambda_mu;  // uncentered input spectrum
    Vector lambda_u;   // uncentered output spectrum
    Vector input_mode_sup_norms;
};

namespace detail {

inline std::optional<LogLogFit> fit_positive_rows(const std::vector<SweepPoint>& rows,
                                                  double SweepPoint::*field) {
    std::vector<double> ns, vals;
    for (const auto& r : rows) {
        if (r.*field > 0.0) {
            ns.push_back(static_cast<double>(r.n));
            vals.push_back(r.*field);
        }
    }
    if (ns.size() < 2) return std::nullopt;
    return fit_loglog_slope(ns, vals);
}

inline double spectrum_tail(const Vector& lambda, double total, int n) {
    double captured = 0.0;
    for (int i = 0; i < std::min<int>(n, static_cast<int>(lambda.size())); ++i)
        captured += lambda[i];
    return std::max(total - captured, 0.0);
}

}  // namespace detail

// Trains one fresh autoencoder per latent dimension (reconstruction term
// only) and lines the test errors up against the POD projection errors and
// the spectral tails of the input and output fields, both estimated from the
// training snapshots.
inline ErrorDecayReport latent_sweep(const SnapshotSet& snapshots,
                                     const SymmetricSparseMatrix& mass_out,
                                     const SymmetricSparseMatrix& mass_in,
                                     const std::function<DLROM(int)>& make_model,
                                     const std::vector<int>& ns, TrainConfig config) {
    if (ns.empty()) throw config_error("latent_sweep: empty latent dimension list");
    for (std::size_t i = 1; i < ns.size(); ++i)
        if (ns[i] <= ns[i - 1]) throw config_error("latent_sweep: latent dims must be ascending");
    if (snapshots.n_test() < 1) throw config_error("latent_sweep: empty test split");

    // the sweep isolates the autoencoder: reconstruction term only
    config.alpha1 = 0.0;
    config.alpha2 = 1.0;
    config.alpha3 = 0.0;
    config.rel_first_term = false;

    const int n_max = ns.back();
    const PODBasis pod_u = pod(snapshots.train_outputs(), mass_out,
                               std::min<int>(n_max, std::min<int>(snapshots.n_train,
                                                                  static_cast<int>(snapshots.outputs.cols()))));
    const PODBasis pod_mu =
        pod(snapshots.train_inputs(), mass_in,
            std::min<int>(snapshots.n_train, static_cast<int>(snapshots.inputs.cols())));

    const double total_u = pod_u.total_energy;
    const double total_mu = pod_mu.total_energy;

    ErrorDecayReport report;
    report.lambda_u = pod_u.eigenvalues;
    report.lambda_mu = pod_mu.eigenvalues;

    // sup norms of the input-field eigenfunctions
    report.input_mode_sup_norms.resize(pod_mu.mode_count());
    for (int k = 0; k < pod_mu.mode_count(); ++k)
        report.input_mode_sup_norms[k] = pod_mu.modes.col(k).cwiseAbs().maxCoeff();

    for (const int n : ns) {
        SweepPoint point;
        point.n = n;
        point.sqrt_tail_mu = std::sqrt(detail::spectrum_tail(report.lambda_mu, total_mu, n));
        point.sqrt_tail_u = std::sqrt(detail::spectrum_tail(report.lambda_u, total_u, n));

        const PODBasis truncated = truncate_basis(pod_u, std::min(n, pod_u.mode_count()));
        const ProjectionError pod_err = pod_projection_error(truncated, snapshots.test_outputs(), mass_out);
        point.e_pod = pod_err.absolute;
        point.e_pod_rel = pod_err.relative;

        try {
            DLROM model = make_model(n);
            TrainConfig cfg = config;
            cfg.seed = mix_seed(config.seed, static_cast<std::uint64_t>(n));
            train(model, snapshots, mass_out, cfg);
            const TestError ae = test_error_ae(model, snapshots.test_outputs(), mass_out);
            point.e_ae = ae.absolute;
            point.e_ae_rel = ae.relative;
        } catch (const numerical_error& e) {
            throw numerical_error("latent_sweep at n=" + std::to_string(n) + ": " + e.what());
        }
        report.rows.push_back(point);
    }

    report.beta_ae = detail::fit_positive_rows(report.rows, &SweepPoint::e_ae);
    report.beta_pod = detail::fit_positive_rows(report.rows, &SweepPoint::e_pod);
    report.beta_mu = detail::fit_positive_rows(report.rows, &SweepPoint::sqrt_tail_mu);
    report.beta_u = detail::fit_positive_rows(report.rows, &SweepPoint::sqrt_tail_u);
    return report;
}

// ---------------------------------------------------------------------------
// reference architectures, widths rescaled proportionally to the mesh size
// ---------------------------------------------------------------------------

inline int scaled_width(int reference_width, int nh, int reference_nh, int floor_width = 4) {
    const double w = static_cast<double>(reference_width) * nh / reference_nh;
    return std::max(floor_width, static_cast<int>(std::lround(w)));
}

inline std::vector<Point2> unit_square_lattice(int nodes_per_side) {
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(nodes_per_side) * nodes_per_side);
    const double h = nodes_per_side > 1 ? 1.0 / (nodes_per_side - 1) : 1.0;
    for (int j = 0; j < nodes_per_side; ++j)
        for (int i = 0; i < nodes_per_side; ++i) pts.push_back({i * h, j * h});
    return pts;
}

inline std::vector<Point2> segment_centers(double length, int cells) {
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(cells));
    const double h = length / cells;
    for (int i = 0; i < cells; ++i) pts.push_back({(i + 0.5) * h, 0.0});
    return pts;
}

// dense autoencoder N_h -> w -> n -> w -> N_h with 0.1-leaky activations and
// a linear output layer
inline DLROM make_square_field_model(const StructuredTriMesh& mesh, int latent_dim,
                                     std::uint64_t seed, int reference_nh,
                                     double phi_support_1 = 0.125, double phi_support_2 = 0.25) {
    const int nh = mesh.node_count();
    const int w = std::max(scaled_width(500, nh, reference_nh), latent_dim);
    const Activation rho = Activation::leaky(0.1);

    DLROM model;
    model.latent_dim = latent_dim;
    model.encoder.layers = {make_dense_layer(nh, w, rho), make_dense_layer(w, latent_dim, rho)};
    model.decoder.layers = {make_dense_layer(latent_dim, w, rho),
                            make_dense_layer(w, nh, Activation::identity())};

    // mesh-informed reduction of the input field over two coarser lattices
    const int side = mesh.n_div + 1;
    const int g1 = std::max(2, static_cast<int>(std::lround(26.0 * side / 51.0)));
    const int g2 = std::max(2, static_cast<int>(std::lround(13.0 * side / 51.0)));
    std::vector<Point2> mesh_pts = mesh.nodes;
    const std::vector<Point2> grid1 = unit_square_lattice(g1);
    const std::vector<Point2> grid2 = unit_square_lattice(g2);
    model.reduced_map.layers = {
        make_mesh_informed_layer(grid1, mesh_pts, phi_support_1, Activation::tanh_fn()),
        make_mesh_informed_layer(grid2, grid1, phi_support_2, rho),
        make_dense_layer(g2 * g2, latent_dim, rho)};

    Rng enc_rng(mix_seed(seed, 1));
    Rng dec_rng(mix_seed(seed, 2));
    Rng phi_rng(mix_seed(seed, 3));
    init_he_uniform(model.encoder, enc_rng);
    init_he_uniform(model.decoder, dec_rng);
    init_he_uniform(model.reduced_map, phi_rng);
    model.validate();
    return model;
}

inline DLROM make_darcy_model(const StructuredTriMesh& mesh, int latent_dim, std::uint64_t seed) {
    return make_square_field_model(mesh, latent_dim, seed, 2601);
}

// single-layer encoder, two-layer decoder ending in a soft clamp matched to
// the [0, 1/2] data range
inline DLROM make_burgers_model(const UniformGrid1D& grid, int latent_dim, std::uint64_t seed) {
    const int nh = grid.n_cells;
    const int w = std::max(scaled_width(200, nh, 500), latent_dim);
    const Activation rho = Activation::leaky(0.1);

    DLROM model;
    model.latent_dim = latent_dim;
    model.encoder.layers = {make_dense_layer(nh, latent_dim, rho)};
    model.decoder.layers = {make_dense_layer(latent_dim, w, rho),
                            make_dense_layer(w, nh, Activation::soft_clamp())};

    const int m1 = std::max(2, nh / 2);
    const int m2 = std::max(2, nh / 4);
    model.reduced_map.layers = {
        make_mesh_informed_layer(segment_centers(grid.length, m1), segment_centers(grid.length, nh),
                                 0.25, rho),
        make_mesh_informed_layer(segment_centers(grid.length, m2), segment_centers(grid.length, m1),
                                 0.5, rho),
        make_dense_layer(m2, latent_dim, rho)};

    Rng enc_rng(mix_seed(seed, 1));
    Rng dec_rng(mix_seed(seed, 2));
    Rng phi_rng(mix_seed(seed, 3));
    init_he_uniform(model.encoder, enc_rng);
    init_he_uniform(model.decoder, dec_rng);
    init_he_uniform(model.reduced_map, phi_rng);
    model.validate();
    return model;
}

// Autoencoder for the three-parameter problem. The decoder gets an extra
// narrow layer in front of the wide one: the concentrated moving source
// makes the decoding map strongly nonlinear in the latent coordinates, and
// the deeper stack fits it in the same epoch budget where the flat one
// stalls. The reduced map takes the three scalar parameters through a small
// dense network.
inline DLROM make_cookie_model(const StructuredTriMesh& mesh, int latent_dim, std::uint64_t seed) {
    const int nh = mesh.node_count();
    const int w = std::max(scaled_width(500, nh, 3721), latent_dim);
    const Activation rho = Activation::leaky(0.1);

    DLROM model;
    model.latent_dim = latent_dim;
    model.encoder.layers = {make_dense_layer(nh, w, rho), make_dense_layer(w, latent_dim, rho)};
    model.decoder.layers = {make_dense_layer(latent_dim, 64, rho), make_dense_layer(64, w, rho),
                            make_dense_layer(w, nh, Activation::identity())};
    model.reduced_map.layers = {make_dense_layer(3, 64, Activation::tanh_fn()),
                                make_dense_layer(64, 64, rho),
                                make_dense_layer(64, latent_dim, rho)};

    Rng enc_rng(mix_seed(seed, 1));
    Rng dec_rng(mix_seed(seed, 2));
    Rng phi_rng(mix_seed(seed, 3));
    init_he_uniform(model.encoder, enc_rng);
    init_he_uniform(model.decoder, dec_rng);
    init_he_uniform(model.reduced_map, phi_rng);
    model.validate();
    return model;
}

// ---------------------------------------------------------------------------
// checkpoint triples
// ---------------------------------------------------------------------------

inline void save_dlrom(const DLROM& model, const std::string& dir, std::uint64_t config_hash) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    save_network(model.encoder, (fs::path(dir) / "encoder.ldlm").string());
    save_network(model.decoder, (fs::path(dir) / "decoder.ldlm").string());
    save_network(model.reduced_map, (fs::path(dir) / "reduced_map.ldlm").string());
    std::ofstream manifest(fs::path(dir) / "manifest.txt");
    manifest << "format 1\n"
             << "config_hash " << config_hash << "\n"
             << "latent_dim " << model.latent_dim << "\n"
             << "encoder encoder.ldlm\n"
             << "decoder decoder.ldlm\n"
             << "reduced_map reduced_map.ldlm\n";
}

inline DLROM load_dlrom(const std::string& dir) {
    namespace fs = std::filesystem;
    DLROM model;
    model.encoder = load_network((fs::path(dir) / "encoder.ldlm").string());
    model.decoder = load_network((fs::path(dir) / "decoder.ldlm").string());
    model.reduced_map = load_network((fs::path(dir) / "reduced_map.ldlm").string());
    model.latent_dim = model.encoder.output_width();
    model.validate();
    return model;
}

}  // namespace romlab

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "romlab/dlrom.hpp"
#include "romlab/neural.hpp"

namespace romlab {

struct GradCheckResult {
    std::string name;
    double max_rel_error = 0.0;
    bool pass = false;
};

namespace detail {

// central differences with step 1e-5; entries where both gradients are tiny
// in absolute terms are compared absolutely to avoid 0/0 noise
inline double gradcheck_max_rel_error(const std::function<double(const Vector&)>& loss_of,
                                      const std::function<Vector(const Vector&)>& grad_of,
                                      const Vector& at, double step = 1e-5,
                                      double tiny = 1e-9) {
    const Vector analytic = grad_of(at);
    double worst = 0.0;
    Vector p = at;
    for (int k = 0; k < at.size(); ++k) {
        const double saved = p[k];
        p[k] = saved + step;
        const double up = loss_of(p);
        p[k] = saved - step;
        const double dn = loss_of(p);
        p[k] = saved;
        const double fd = (up - dn) / (2.0 * step);
        const double denom = std::max(std::abs(fd), std::abs(analytic[k]));
        if (denom < tiny) continue;
        worst = std::max(worst, std::abs(fd - analytic[k]) / denom);
    }
    return worst;
}

inline double squared_error_loss(const Network& net, const Matrix& x, const Matrix& target) {
    const Matrix y = forward(net, x);
    return (y - target).squaredNorm() / x.rows();
}

inline Vector squared_error_grads(Network& net, const Matrix& x, const Matrix& target) {
    ForwardCache cache;
    const Matrix y = forward(net, x, &cache);
    const Matrix upstream = 2.0 / x.rows() * (y - target);
    return flatten_grads(backward(net, cache, upstream));
}

}  // namespace detail

// checks one network against central differences of a squared-error loss
inline GradCheckResult gradcheck_network(const std::string& name, Network net, const Matrix& x,
                                         const Matrix& target, double tol = 1e-6) {
    const Vector theta0 = get_parameters(net);
    auto loss_of = [&](const Vector& theta) {
        set_parameters(net, theta);
        return detail::squared_error_loss(net, x, target);
    };
    auto grad_of = [&](const Vector& theta) {
        set_parameters(net, theta);
        return detail::squared_error_grads(net, x, target);
    };
    GradCheckResult result;
    result.name = name;
    result.max_rel_error = detail::gradcheck_max_rel_error(loss_of, grad_of, theta0);
    result.pass = result.max_rel_error < tol;
    return result;
}

inline GradCheckResult gradcheck_dlrom_loss(const std::string& name, DLROM model, const Matrix& x,
                                            const Matrix& u, const SymmetricSparseMatrix& mass,
                                            const TrainConfig& config, double tol = 1e-6) {
    const Eigen::SparseMatrix<double> msp = mass.to_eigen();

    auto pack = [&]() {
        const Vector pe = get_parameters(model.encoder);
        const Vector pd = get_parameters(model.decoder);
        const Vector pp = get_parameters(model.reduced_map);
        Vector all(pe.size() + pd.size() + pp.size());
        all << pe, pd, pp;
        return all;
    };
    auto unpack = [&](const Vector& all) {
        const long ne = parameter_count(model.encoder);
        const long nd = parameter_count(model.decoder);
        const long np = parameter_count(model.reduced_map);
        set_parameters(model.encoder, all.segment(0, ne));
        set_parameters(model.decoder, all.segment(ne, nd));
        set_parameters(model.reduced_map, all.segment(ne + nd, np));
    };

    const Vector theta0 = pack();
    auto loss_of = [&](const Vector& theta) {
        unpack(theta);
        return dlrom_loss(model, x, u, msp, config).total;
    };
    auto grad_of = [&](const Vector& theta) {
        unpack(theta);
        DLROMGrads grads;
        dlrom_loss(model, x, u, msp, config, &grads);
        Vector ge = flatten_grads(grads.encoder);
        Vector gd = flatten_grads(grads.decoder);
        Vector gp = flatten_grads(grads.reduced_map);
        Vector all(ge.size() + gd.size() + gp.size());
        all << ge, gd, gp;
        return all;
    };

    GradCheckResult result;
    result.name = name;
    result.max_rel_error = detail::gradcheck_max_rel_error(loss_of, grad_of, theta0);
    result.pass = result.max_rel_error < tol;
    return result;
}

// The full battery: every activation on dense and geometrically masked
// layers, a deeper mixed network, and the complete 3-term objective in both
// its quadratic and relative forms.
inline std::vector<GradCheckResult> gradcheck_suite(std::uint64_t seed = 20240917ULL) {
    std::vector<GradCheckResult> results;
    Rng rng(seed);

    const auto activations = std::vector<std::pair<std::string, Activation>>{
        {"identity", Activation::identity()},
        {"leaky_relu", Activation::leaky(0.1)},
        {"tanh", Activation::tanh_fn()},
        {"soft_clamp", Activation::soft_clamp()},
    };

    auto random_matrix = [&](int r, int c) {
        Matrix m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-2.0, 2.0);
        return m;
    };

    const int batch = 5, in = 6, out = 4;
    for (const auto& [act_name, act] : activations) {
        {
            Network net;
            net.layers = {make_dense_layer(in, out, act)};
            init_he_uniform(net, rng);
            results.push_back(gradcheck_network("dense/" + act_name, net, random_matrix(batch, in),
                                                random_matrix(batch, out)));
        }
        {
            std::vector<Point2> cin, cout;
            for (int j = 0; j < in; ++j) cin.push_back({j / double(in - 1), 0.0});
            for (int i = 0; i < out; ++i) cout.push_back({i / double(out - 1), 0.0});
            Network net;
            net.layers = {make_mesh_informed_layer(cout, cin, 0.4, act)};
            init_he_uniform(net, rng);
            results.push_back(gradcheck_network("masked/" + act_name, net,
                                                random_matrix(batch, in), random_matrix(batch, out)));
        }
    }

    {
        Network net;
        net.layers = {make_dense_layer(6, 8, Activation::tanh_fn()),
                      make_dense_layer(8, 7, Activation::leaky(0.1)),
                      make_dense_layer(7, 5, Activation::soft_clamp())};
        init_he_uniform(net, rng);
        results.push_back(gradcheck_network("deep/mixed", net, random_matrix(4, 6),
                                            random_matrix(4, 5)));
    }

    // tiny three-network model against the full objective
    {
        const int nh = 7, din = 5, n = 2, b = 4;
        DLROM model;
        model.latent_dim = n;
        model.encoder.layers = {make_dense_layer(nh, 6, Activation::leaky(0.1)),
                                make_dense_layer(6, n, Activation::leaky(0.1))};
        model.decoder.layers = {make_dense_layer(n, 6, Activation::leaky(0.1)),
                                make_dense_layer(6, nh, Activation::identity())};
        model.reduced_map.layers = {make_dense_layer(din, 6, Activation::tanh_fn()),
                                    make_dense_layer(6, n, Activation::leaky(0.1))};
        Rng init(seed + 17);
        init_he_uniform(model.encoder, init);
        init_he_uniform(model.decoder, init);
        init_he_uniform(model.reduced_map, init);

        // SPD mass with off-diagonal coupling
        std::vector<SymmetricSparseMatrix::Triplet> trip;
        for (int i = 0; i < nh; ++i) trip.push_back({i, i, 1.0 + 0.1 * i});
        for (int i = 0; i + 1 < nh; ++i) trip.push_back({i, i + 1, 0.2});
        const SymmetricSparseMatrix mass = SymmetricSparseMatrix::from_triplets(nh, trip);

        const Matrix x = random_matrix(b, din);
        Matrix u = random_matrix(b, nh);
        u.array() += 2.5;  // keep norms away from zero for the relative form

        TrainConfig quad;
        quad.alpha1 = 0.2;
        quad.alpha2 = 0.2;
        quad.alpha3 = 1.0 / 16.0;
        results.push_back(gradcheck_dlrom_loss("loss/three_term", model, x, u, mass, quad));

        TrainConfig rel = quad;
        rel.alpha1 = 1.0;
        rel.rel_first_term = true;
        results.push_back(gradcheck_dlrom_loss("loss/three_term_rel", model, x, u, mass, rel));
    }

    return results;
}

}  // namespace romlab

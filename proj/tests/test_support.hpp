#pragma once

#include "confcurv/mesh.hpp"

#include <cmath>
#include <random>

namespace testsupport {

// Random smooth field: a few plane waves in the vertex coordinates, scaled
// so that its sup norm equals `amp`.
inline confcurv::Vector smooth_random(const confcurv::Mesh& m, double amp, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const Eigen::Index dim = m.vertices().cols();
    confcurv::Vector f = confcurv::Vector::Zero(m.num_vertices());
    for (int wave = 0; wave < 4; ++wave) {
        Eigen::VectorXd k(dim);
        for (Eigen::Index d = 0; d < dim; ++d) {
            k[d] = 2.0 * unit(rng);
        }
        const double phase = 3.0 * unit(rng);
        const double weight = unit(rng);
        for (Eigen::Index i = 0; i < m.num_vertices(); ++i) {
            f[i] += weight * std::sin(m.vertices().row(i).dot(k) + phase);
        }
    }
    const double sup = f.cwiseAbs().maxCoeff();
    return sup > 0.0 ? confcurv::Vector(f * (amp / sup)) : f;
}

inline confcurv::Vector uniform_random(Eigen::Index n, double lo, double hi, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    confcurv::Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = dist(rng);
    }
    return v;
}

} // namespace testsupport

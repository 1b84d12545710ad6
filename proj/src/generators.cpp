#include "confcurv/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

namespace confcurv::gen {

namespace {

constexpr double kPi = std::numbers::pi;

using Tri = std::array<int, 3>;
using Tet = std::array<int, 4>;

IndexMatrix to_matrix(const std::vector<Tri>& tris)
{
    IndexMatrix out(static_cast<Eigen::Index>(tris.size()), 3);
    for (std::size_t t = 0; t < tris.size(); ++t) {
        for (int k = 0; k < 3; ++k) {
            out(static_cast<Eigen::Index>(t), k) = tris[t][static_cast<std::size_t>(k)];
        }
    }
    return out;
}

IndexMatrix to_matrix(const std::vector<Tet>& tets)
{
    IndexMatrix out(static_cast<Eigen::Index>(tets.size()), 4);
    for (std::size_t t = 0; t < tets.size(); ++t) {
        for (int k = 0; k < 4; ++k) {
            out(static_cast<Eigen::Index>(t), k) = tets[t][static_cast<std::size_t>(k)];
        }
    }
    return out;
}

// Hexagonal lattice of `rings` rings around a center vertex, ring k having
// 6k vertices. Lattice points are pushed radially onto circles of radius
// k/rings and handed to `place` as (radius, angle).
template <typename Place>
Mesh hex_disk(int rings, int dim, Place place)
{
    auto first = [](int k) { return k == 0 ? 0 : 1 + 3 * k * (k - 1); };
    auto id = [&](int k, int j) {
        if (k == 0) {
            return 0;
        }
        const int count = 6 * k;
        return first(k) + ((j % count) + count) % count;
    };
    const int nv = first(rings + 1);
    Matrix v(nv, dim);
    v.row(0) = place(0.0, 0.0).transpose();
    for (int k = 1; k <= rings; ++k) {
        for (int j = 0; j < 6 * k; ++j) {
            const int s = j / k;
            const int i = j % k;
            const Eigen::Vector2d c0(std::cos(kPi / 3 * s), std::sin(kPi / 3 * s));
            const Eigen::Vector2d c1(std::cos(kPi / 3 * (s + 1)), std::sin(kPi / 3 * (s + 1)));
            const Eigen::Vector2d p = k * c0 + i * (c1 - c0);
            v.row(id(k, j)) = place(static_cast<double>(k) / rings, std::atan2(p.y(), p.x())).transpose();
        }
    }
    std::vector<Tri> tris;
    for (int k = 0; k < rings; ++k) {
        for (int s = 0; s < 6; ++s) {
            for (int i = 0; i <= k; ++i) {
                tris.push_back({id(k + 1, s * (k + 1) + i), id(k + 1, s * (k + 1) + i + 1), id(k, s * k + i)});
            }
            for (int i = 0; i < k; ++i) {
                tris.push_back({id(k, s * k + i), id(k + 1, s * (k + 1) + i + 1), id(k, s * k + i + 1)});
            }
        }
    }
    return Mesh(std::move(v), to_matrix(tris));
}

// N-around by M-high periodic strip; returns vertex grid ids and triangles.
std::vector<Tri> periodic_strip(int around, int layers)
{
    std::vector<Tri> tris;
    auto id = [around](int j, int k) { return k * around + ((j % around) + around) % around; };
    for (int k = 0; k < layers; ++k) {
        for (int j = 0; j < around; ++j) {
            const int a = id(j, k);
            const int b = id(j + 1, k);
            const int c = id(j, k + 1);
            const int d = id(j + 1, k + 1);
            tris.push_back({a, b, d});
            tris.push_back({a, d, c});
        }
    }
    return tris;
}

} // namespace

Mesh disk(int rings)
{
    return hex_disk(rings, 2, [](double t, double a) {
        return Eigen::VectorXd(Eigen::Vector2d(t * std::cos(a), t * std::sin(a)));
    });
}

Mesh hemisphere(int rings)
{
    return hex_disk(rings, 3, [](double t, double a) {
        const double polar = 0.5 * kPi * t;
        return Eigen::VectorXd(Eigen::Vector3d(std::sin(polar) * std::cos(a),
                                               std::sin(polar) * std::sin(a), std::cos(polar)));
    });
}

Mesh annulus(int around, double r_inner)
{
    const int layers = std::max(1, static_cast<int>(std::lround(around * std::log(1.0 / r_inner) / (2.0 * kPi))));
    Matrix v((layers + 1) * around, 2);
    for (int k = 0; k <= layers; ++k) {
        const double r = r_inner * std::pow(1.0 / r_inner, static_cast<double>(k) / layers);
        // Half-step twist on alternate rings keeps triangles close to equilateral.
        const double shift = (k % 2) * 0.5;
        for (int j = 0; j < around; ++j) {
            const double a = 2.0 * kPi * (j + shift) / around;
            v(k * around + j, 0) = r * std::cos(a);
            v(k * around + j, 1) = r * std::sin(a);
        }
    }
    std::vector<Tri> tris;
    auto id = [around](int j, int k) { return k * around + ((j % around) + around) % around; };
    for (int k = 0; k < layers; ++k) {
        for (int j = 0; j < around; ++j) {
            if (k % 2 == 0) {
                tris.push_back({id(j, k), id(j + 1, k), id(j, k + 1)});
                tris.push_back({id(j + 1, k), id(j + 1, k + 1), id(j, k + 1)});
            } else {
                tris.push_back({id(j, k), id(j + 1, k + 1), id(j, k + 1)});
                tris.push_back({id(j, k), id(j + 1, k), id(j + 1, k + 1)});
            }
        }
    }
    return Mesh(std::move(v), to_matrix(tris));
}

Mesh rectangle(int nx, int ny, double w, double h)
{
    Matrix v((nx + 1) * (ny + 1), 2);
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            v(j * (nx + 1) + i, 0) = w * i / nx;
            v(j * (nx + 1) + i, 1) = h * j / ny;
        }
    }
    std::vector<Tri> tris;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = j * (nx + 1) + i;
            const int b = a + 1;
            const int c = a + nx + 1;
            const int d = c + 1;
            tris.push_back({a, b, d});
            tris.push_back({a, d, c});
        }
    }
    return Mesh(std::move(v), to_matrix(tris));
}

Mesh cylinder(int around, double height)
{
    const double step = 2.0 * kPi / around;
    const int layers = std::max(1, static_cast<int>(std::lround(height / step)));
    const double dz = height / layers;
    Matrix v((layers + 1) * around, 3);
    for (int k = 0; k <= layers; ++k) {
        for (int j = 0; j < around; ++j) {
            const double a = step * j;
            v(k * around + j, 0) = std::cos(a);
            v(k * around + j, 1) = std::sin(a);
            v(k * around + j, 2) = dz * k;
        }
    }
    Mesh embedded(v, to_matrix(periodic_strip(around, layers)));
    Vector lengths(embedded.num_edges());
    for (Eigen::Index e = 0; e < embedded.num_edges(); ++e) {
        const int a = embedded.edges()(e, 0);
        const int b = embedded.edges()(e, 1);
        int dj = std::abs(a % around - b % around);
        dj = std::min(dj, around - dj);
        const int dk = std::abs(a / around - b / around);
        lengths[e] = std::hypot(step * dj, dz * dk);
    }
    return embedded.with_edge_lengths(std::move(lengths));
}

Mesh half_cylinder(int around, double height)
{
    Mesh m = cylinder(around, height);
    std::vector<BoundaryTag> tags(static_cast<std::size_t>(m.num_boundary_facets()), BoundaryTag::D0);
    for (Eigen::Index f = 0; f < m.num_boundary_facets(); ++f) {
        if (m.vertices()(m.boundary_facets()(f, 0), 2) > 0.5 * height) {
            tags[static_cast<std::size_t>(f)] = BoundaryTag::DM;
        }
    }
    return m.with_boundary_tags(std::move(tags));
}

Mesh sphere_minus_caps(int level, double cap_radius)
{
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> pts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                                        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                                        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& p : pts) {
        p.normalize();
    }
    std::vector<Tri> tris = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) {
                return it->second;
            }
            pts.push_back((pts[static_cast<std::size_t>(a)] + pts[static_cast<std::size_t>(b)]).normalized());
            const int id = static_cast<int>(pts.size()) - 1;
            mid.emplace(key, id);
            return id;
        };
        std::vector<Tri> next;
        for (const auto& f : tris) {
            const int ab = midpoint(f[0], f[1]);
            const int bc = midpoint(f[1], f[2]);
            const int ca = midpoint(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        tris = std::move(next);
    }
    const std::array<Eigen::Vector3d, 3> centers = {Eigen::Vector3d(1, 0, 0).normalized(),
                                                    Eigen::Vector3d(-0.5, 0.8, 0.1).normalized(),
                                                    Eigen::Vector3d(-0.5, -0.8, -0.1).normalized()};
    const double limit = std::cos(cap_radius);
    auto in_cap = [&](int v) {
        for (const auto& c : centers) {
            if (pts[static_cast<std::size_t>(v)].dot(c) > limit) {
                return true;
            }
        }
        return false;
    };
    std::vector<Tri> kept;
    for (const auto& f : tris) {
        if (!in_cap(f[0]) && !in_cap(f[1]) && !in_cap(f[2])) {
            kept.push_back(f);
        }
    }
    std::vector<int> remap(pts.size(), -1);
    int count = 0;
    for (auto& f : kept) {
        for (auto& v : f) {
            if (remap[static_cast<std::size_t>(v)] < 0) {
                remap[static_cast<std::size_t>(v)] = count++;
            }
            v = remap[static_cast<std::size_t>(v)];
        }
    }
    Matrix v(count, 3);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (remap[i] >= 0) {
            v.row(remap[i]) = pts[i].transpose();
        }
    }
    return Mesh(std::move(v), to_matrix(kept));
}

namespace {

// Kuhn subdivision of an n^3 grid of points given by `place`.
template <typename Place>
Mesh grid_tets(int n, Place place)
{
    const int side = n + 1;
    auto id = [side](int i, int j, int k) { return (k * side + j) * side + i; };
    Matrix v(side * side * side, 3);
    for (int k = 0; k <= n; ++k) {
        for (int j = 0; j <= n; ++j) {
            for (int i = 0; i <= n; ++i) {
                v.row(id(i, j, k)) = place(i, j, k).transpose();
            }
        }
    }
    std::array<int, 3> perm = {0, 1, 2};
    std::vector<std::array<int, 3>> perms;
    do {
        perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::vector<Tet> tets;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                for (const auto& p : perms) {
                    std::array<int, 3> c = {i, j, k};
                    Tet t{};
                    t[0] = id(c[0], c[1], c[2]);
                    for (int s = 0; s < 3; ++s) {
                        ++c[static_cast<std::size_t>(p[static_cast<std::size_t>(s)])];
                        t[static_cast<std::size_t>(s + 1)] = id(c[0], c[1], c[2]);
                    }
                    tets.push_back(t);
                }
            }
        }
    }
    return Mesh(std::move(v), to_matrix(tets));
}

} // namespace

Mesh cube(int n)
{
    return grid_tets(n, [n](int i, int j, int k) {
        return Eigen::Vector3d(static_cast<double>(i) / n, static_cast<double>(j) / n,
                               static_cast<double>(k) / n);
    });
}

Mesh ball(int n)
{
    return grid_tets(n, [n](int i, int j, int k) {
        Eigen::Vector3d p(2.0 * i / n - 1.0, 2.0 * j / n - 1.0, 2.0 * k / n - 1.0);
        const double r2 = p.norm();
        if (r2 == 0.0) {
            return p;
        }
        return Eigen::Vector3d(p * (p.cwiseAbs().maxCoeff() / r2));
    });
}

Mesh by_name(const std::string& name, int resolution)
{
    if (name == "disk") {
        return disk(resolution);
    }
    if (name == "annulus") {
        return annulus(resolution);
    }
    if (name == "rectangle" || name == "square") {
        return rectangle(resolution, resolution);
    }
    if (name == "cylinder") {
        return cylinder(resolution, 2.0);
    }
    if (name == "half_cylinder") {
        return half_cylinder(resolution, 1.0);
    }
    if (name == "pants") {
        return sphere_minus_caps(resolution);
    }
    if (name == "hemisphere") {
        return hemisphere(resolution);
    }
    if (name == "cube") {
        return cube(resolution);
    }
    if (name == "ball") {
        return ball(resolution);
    }
    throw PreconditionError("unknown generator '" + name + "'");
}

} // namespace confcurv::gen

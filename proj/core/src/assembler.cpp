#include "cmcglue/assembler.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "cmcglue/clifford.hpp"
#include "cmcglue/error.hpp"

namespace cmcglue {

double match_translate(int p, int q, double t) {
    const double ts = minimal_angle(p, q);
    if (!(t > ts && t < M_PI / 2))
        throw std::domain_error("match_translate: t must lie in (t*, pi/2)");
    const double target = -slice_mean_curvature(CliffordSlice(p, q, t));
    // H is strictly decreasing with H(0+) = +inf, H(t*) = 0, so the root of
    // H(x) = target > 0 is bracketed by (0, t*)
    double lo = 1e-12, hi = ts;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double h = slice_mean_curvature(CliffordSlice(p, q, mid));
        (h > target ? lo : hi) = mid;
        if (hi - lo < 1e-16) break;
    }
    double x = 0.5 * (lo + hi);
    for (int k = 0; k < 4; ++k) { // Newton polish
        const double h = slice_mean_curvature(CliffordSlice(p, q, x));
        const double dh = -q / (std::sin(x) * std::sin(x)) - p / (std::cos(x) * std::cos(x));
        x -= (h - target) / dh;
    }
    if (std::abs(slice_mean_curvature(CliffordSlice(p, q, x)) +
                 slice_mean_curvature(CliffordSlice(p, q, t))) > 1e-12)
        throw numeric_error("match_translate: H(t-) + H(t) residual above 1e-12");
    return x;
}

GluingParameters solve_neck_scale(int p, int q, double t, double gamma_lambda, double t_window) {
    const int n = p + q;
    const double ts = minimal_angle(p, q);
    if (!(t > ts && t - ts <= t_window))
        throw window_error("solve_neck_scale: t outside the validated window (t*, t* + "
                           + std::to_string(t_window) + "]");
    GluingParameters gp;
    gp.p = p;
    gp.q = q;
    gp.t = gp.t_plus = t;
    gp.t_minus = match_translate(p, q, t);
    gp.gamma_lambda = gamma_lambda;
    gp.neck_integral = neck_height_integral(n);

    const double gap = gp.t_plus - gp.t_minus;
    const auto F = [&](double e) {
        return e * gp.neck_integral + 2.0 * std::pow(e, n - 1) * gamma_lambda - gap;
    };
    double lo = 0.0, hi = 2.0 * gap / gp.neck_integral;
    int guard = 0;
    while (F(hi) < 0) {
        hi *= 2.0;
        if (++guard > 60 || hi > 1.0)
            throw window_error("solve_neck_scale: no positive root in bracket");
    }
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (F(mid) < 0 ? lo : hi) = mid;
    }
    gp.eps = 0.5 * (lo + hi);
    if (std::abs(F(gp.eps)) > 1e-12)
        throw numeric_error("solve_neck_scale: matching equation residual above 1e-12");
    const double ratio = gap / gp.eps;
    if (ratio < 0.5 * gp.neck_integral || ratio > 2.0 * gp.neck_integral)
        throw window_error("solve_neck_scale: (t+ - t-)/eps outside [0.5, 2] * neck integral");
    gp.r = std::pow(gp.eps, (n - 1.0) / n);
    gp.s_max = std::acosh(std::pow(gp.eps, -(n - 1.0) / n)) / (n - 1);
    return gp;
}

Eigen::VectorXd toroidal_embed(const ProductPoint& z, double v) {
    if (!(v > 0 && v < M_PI / 2))
        throw std::domain_error("toroidal_embed: v must lie in (0, pi/2)");
    Eigen::VectorXd out(z.xi.size() + z.zeta.size());
    out.head(z.xi.size()) = std::cos(v) * z.xi;
    out.tail(z.zeta.size()) = std::sin(v) * z.zeta;
    return out;
}

ProductPoint normal_coords(int p, int q, const Eigen::VectorXd& zbar, double guard) {
    if (zbar.size() != p + q)
        throw std::domain_error("normal_coords: zbar must have length n = p + q");
    if (zbar.norm() > guard)
        throw chart_error("normal_coords: |zbar| beyond the injectivity guard "
                          + std::to_string(guard));
    return ProductChart::canonical(p, q).point(zbar);
}

double cutoff_eta(double w) {
    const double x = (std::abs(w) - 0.5) / 1.5;
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double s0 = std::exp(-1.0 / x);
    const double s1 = std::exp(-1.0 / (1.0 - x));
    return s0 / (s0 + s1);
}

double neck_s_from_radius(const GluingParameters& gp, double rho, bool upper) {
    const int n = gp.n();
    const double F = rho / gp.eps;
    if (F < 1.0)
        throw chart_error("neck_s_from_radius: rho below the neck waist eps");
    const double s = std::acosh(std::pow(F, n - 1)) / (n - 1);
    return upper ? s : -s;
}

double transition_height(const GluingParameters& gp, const GreensField& field,
                         const ProductChart& mu_chart, const Eigen::VectorXd& zbar, bool upper) {
    const double rho = zbar.norm();
    if (rho < gp.r / 4 || rho > 4 * gp.r)
        throw chart_error("transition_height: |zbar| outside [r/4, 4r]");
    const double eta = cutoff_eta(rho / gp.r);
    const int n = gp.n();
    double graph = 0.0;
    if (eta > 0.0) {
        // mollified evaluation: the raw partial sum does not converge fast
        // enough at splice-radius distances along factor-aligned directions
        const double G = field.evaluate_filtered(mu_chart.point(zbar), field.jet_sigma(rho));
        graph = upper ? gp.t_plus - std::pow(gp.eps, n - 1) * G
                      : gp.t_minus + std::pow(gp.eps, n - 1) * G;
    }
    double neck = 0.0;
    if (eta < 1.0) {
        const CatenoidProfile prof(n);
        const double s = neck_s_from_radius(gp, rho, upper);
        neck = gp.mid() + gp.eps * prof.psi(s);
    }
    return eta * graph + (1.0 - eta) * neck;
}

const char* region_name(Region r) {
    switch (r) {
    case Region::CapPlus: return "cap_plus";
    case Region::CapMinus: return "cap_minus";
    case Region::Neck: return "neck";
    case Region::TransitionUpper: return "transition_upper";
    case Region::TransitionLower: return "transition_lower";
    }
    return "?";
}

double atlas_weight(Region region, double dist, double s, const GluingParameters& gp,
                    double weight_radius) {
    if (region == Region::Neck) return gp.eps * std::cosh(s);
    const double Rw = weight_radius;
    if (dist >= 2.0 * Rw) return 1.0;
    if (dist >= Rw) {
        // log-linear from zeta = Rw at dist = Rw to zeta = 1 at dist = 2 Rw
        const double tau = (std::log(dist) - std::log(Rw)) / std::log(2.0);
        return std::pow(Rw, 1.0 - tau);
    }
    return dist;
}

std::vector<Eigen::VectorXd> sphere_grid(int d, int density) {
    std::vector<Eigen::VectorXd> out;
    if (d == 1) {
        const int m = std::max(3, 2 * density);
        for (int k = 0; k < m; ++k) {
            const double th = 2.0 * M_PI * k / m;
            Eigen::VectorXd v(2);
            v << std::cos(th), std::sin(th);
            out.push_back(v);
        }
        return out;
    }
    const auto sub = sphere_grid(d - 1, density);
    for (int i = 0; i < density; ++i) {
        const double th = M_PI * (i + 0.5) / density;
        for (const auto& w : sub) {
            Eigen::VectorXd v(d + 1);
            v(0) = std::cos(th);
            v.tail(d) = std::sin(th) * w;
            out.push_back(v);
        }
    }
    return out;
}

namespace {

double min_gluing_distance(const GluingSet& gl, const ProductPoint& z, double a, double b,
                           int* arg = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    for (int m = 0; m < gl.m(); ++m) {
        const double d = product_distance(gl.factor(m), z, a, b);
        if (d < best) {
            best = d;
            if (arg) *arg = m;
        }
    }
    return best;
}

struct CloudKey {
    long long v[8];
    int region;
    bool operator==(const CloudKey& o) const {
        if (region != o.region) return false;
        for (int k = 0; k < 8; ++k)
            if (v[k] != o.v[k]) return false;
        return true;
    }
};
struct CloudKeyHash {
    size_t operator()(const CloudKey& k) const {
        size_t h = std::hash<int>()(k.region);
        for (int i = 0; i < 8; ++i)
            h ^= std::hash<long long>()(k.v[i]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h;
    }
};

CloudKey make_key(const AtlasPoint& pt) {
    CloudKey key{};
    key.region = static_cast<int>(pt.region);
    for (int k = 0; k < pt.embedding.size() && k < 8; ++k)
        key.v[k] = std::llround(pt.embedding(k) * 1e7);
    return key;
}

} // namespace

SurfaceAtlas build_atlas(int p, int q, double t, const SymmetryGroup& group,
                         const GreensField& field, const AtlasResolution& res,
                         double weight_radius, double t_window) {
    if (group.p != p || group.q != q || field.p != p || field.q != q)
        throw std::domain_error("build_atlas: dimension mismatch");
    if (!fixed_bilinear_dimension(group).admissible())
        throw std::domain_error("build_atlas: group is not admissible");

    const int n = p + q;
    const double ts = minimal_angle(p, q);
    const double a = std::cos(ts), b = std::sin(ts);

    double gamma = 0.0;
    if (n == 3) gamma = local_expansion(field, 0, field.default_fit_radii()).gamma_lambda;
    GluingParameters gp = solve_neck_scale(p, q, t, gamma, t_window);
    gp.gamma_lambda = gamma;

    const GluingSet& gl = field.gluing;
    const double epsn1 = std::pow(gp.eps, n - 1);
    const CatenoidProfile prof(n);

    std::vector<AtlasPoint> base;

    // gluing-point charts
    std::vector<ProductChart> mu_charts;
    for (int m = 0; m < gl.m(); ++m)
        mu_charts.push_back(ProductChart::centered(gl.factor(m), p, q));

    auto push_cap = [&](const ProductPoint& z, bool upper) {
        int mu = -1;
        const double dist = min_gluing_distance(gl, z, a, b, &mu);
        if (dist < gp.r) return;
        const double G = field.evaluate_filtered(z, field.jet_sigma(dist));
        AtlasPoint pt;
        pt.region = upper ? Region::CapPlus : Region::CapMinus;
        pt.z = z;
        pt.height = upper ? gp.t_plus - epsn1 * G : gp.t_minus + epsn1 * G;
        pt.embedding = toroidal_embed(z, pt.height);
        pt.dist = dist;
        pt.weight = atlas_weight(pt.region, dist, 0.0, gp, weight_radius);
        base.push_back(std::move(pt));
    };

    // global cap grid
    for (const auto& xi : sphere_grid(p, res.cap_density)) {
        for (const auto& zeta : sphere_grid(q, res.cap_density)) {
            const ProductPoint z{xi, zeta};
            push_cap(z, true);
            push_cap(z, false);
        }
    }
    // per-mu radial refinement rings, geometric radii in [1.05 r, 2 Rw]
    const auto ring_dirs = sphere_grid(n - 1, res.ring_dir_density);
    for (int m = 0; m < gl.m(); ++m) {
        for (int kr = 0; kr < res.ring_radii; ++kr) {
            const double f = static_cast<double>(kr) / (res.ring_radii - 1);
            const double rho = 1.05 * gp.r * std::pow(2.0 * weight_radius / (1.05 * gp.r), f);
            for (const auto& dir : ring_dirs) {
                const ProductPoint z = mu_charts[m].point(rho * dir);
                push_cap(z, true);
                push_cap(z, false);
            }
        }
    }

    // necks: |s| <= s_max, grid on s x S^{n-1}
    const auto neck_dirs = sphere_grid(n - 1, res.neck_dir_density);
    for (int m = 0; m < gl.m(); ++m) {
        for (int ks = 0; ks < res.neck_s_samples; ++ks) {
            const double s = -gp.s_max + 2.0 * gp.s_max * ks / (res.neck_s_samples - 1);
            const double rho = gp.eps * prof.phi(s);
            const double v = gp.mid() + gp.eps * prof.psi(s);
            for (const auto& dir : neck_dirs) {
                AtlasPoint pt;
                pt.region = Region::Neck;
                pt.mu_index = m;
                pt.s = s;
                pt.z = mu_charts[m].point(rho * dir);
                pt.height = v;
                pt.embedding = toroidal_embed(pt.z, v);
                pt.dist = rho;
                pt.weight = atlas_weight(pt.region, rho, s, gp, weight_radius);
                base.push_back(std::move(pt));
            }
        }
    }

    // transitions: annulus r/2 <= rho <= 2r, upper and lower
    const auto trans_dirs = sphere_grid(n - 1, res.trans_dir_density);
    for (int m = 0; m < gl.m(); ++m) {
        for (int kr = 0; kr < res.trans_radii; ++kr) {
            const double f = static_cast<double>(kr) / (res.trans_radii - 1);
            const double rho = 0.5 * gp.r * std::pow(4.0, f);
            for (const auto& dir : trans_dirs) {
                for (bool upper : {true, false}) {
                    AtlasPoint pt;
                    pt.region = upper ? Region::TransitionUpper : Region::TransitionLower;
                    pt.mu_index = m;
                    pt.height = transition_height(gp, field, mu_charts[m], rho * dir, upper);
                    pt.z = mu_charts[m].point(rho * dir);
                    pt.embedding = toroidal_embed(pt.z, pt.height);
                    pt.dist = rho;
                    pt.weight = atlas_weight(pt.region, rho, 0.0, gp, weight_radius);
                    base.push_back(std::move(pt));
                }
            }
        }
    }

    // G-symmetrization: orbit-expand the cloud and dedupe
    SurfaceAtlas atlas;
    atlas.params = gp;
    atlas.weight_radius = weight_radius;
    std::unordered_map<CloudKey, int, CloudKeyHash> seen;
    for (size_t bidx = 0; bidx < base.size(); ++bidx) {
        const AtlasPoint& pt = base[bidx];
        for (const auto& g : group.elements) {
            AtlasPoint img = pt;
            img.orbit_id = static_cast<int>(bidx);
            img.embedding = apply_pair(g, pt.embedding, p, q);
            img.z.xi = g.sigma_p * pt.z.xi;
            img.z.zeta = g.sigma_q * pt.z.zeta;
            if (pt.mu_index >= 0) {
                const Eigen::VectorXd mu_img = apply_pair(g, gl.points[pt.mu_index], p, q);
                int found = -1;
                for (int m = 0; m < gl.m(); ++m)
                    if ((gl.points[m] - mu_img).cwiseAbs().maxCoeff() < 1e-8) {
                        found = m;
                        break;
                    }
                if (found < 0)
                    throw numeric_error("build_atlas: gluing set is not G-invariant");
                img.mu_index = found;
            }
            const CloudKey key = make_key(img);
            if (seen.emplace(key, 1).second) atlas.points.push_back(std::move(img));
        }
    }

    atlas.region_counts.assign(5, 0);
    for (const auto& pt : atlas.points) atlas.region_counts[static_cast<int>(pt.region)]++;
    for (int k = 0; k < 5; ++k)
        if (atlas.region_counts[k] == 0)
            throw numeric_error("build_atlas: region absent from the sampled atlas");
    return atlas;
}

double weighted_sup_norm(const SurfaceAtlas& atlas, const std::vector<double>& values,
                         double gamma) {
    if (values.size() != atlas.points.size())
        throw std::domain_error("weighted_sup_norm: one value per atlas point required");
    double worst = 0.0;
    for (size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k]))
            throw std::domain_error("weighted_sup_norm: values must be finite");
        worst = std::max(worst, std::pow(atlas.points[k].weight, -gamma) * std::abs(values[k]));
    }
    return worst;
}

} // namespace cmcglue

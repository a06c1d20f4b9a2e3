#include "cmcglue/symmetry.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "cmcglue/clifford.hpp"
#include "cmcglue/error.hpp"

namespace cmcglue {

namespace {

constexpr double kElementTol = 1e-8;

bool pair_equal(const OrthogonalPair& g, const OrthogonalPair& h, double tol) {
    return (g.sigma_p - h.sigma_p).cwiseAbs().maxCoeff() < tol
        && (g.sigma_q - h.sigma_q).cwiseAbs().maxCoeff() < tol;
}

void check_orthogonal(const Eigen::MatrixXd& m, const std::string& what) {
    const int N = static_cast<int>(m.rows());
    if (m.cols() != N) throw config_error(what + ": matrix must be square");
    const double dev = (m.transpose() * m - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff();
    if (dev > 1e-10)
        throw config_error(what + ": matrix is not orthogonal (|s^T s - I|_max = "
                           + std::to_string(dev) + ")");
}

} // namespace

OrthogonalPair identity_pair(int p, int q) {
    return {Eigen::MatrixXd::Identity(p + 1, p + 1), Eigen::MatrixXd::Identity(q + 1, q + 1)};
}

OrthogonalPair rho_pair(int p, int q) {
    Eigen::MatrixXd sp = -Eigen::MatrixXd::Identity(p + 1, p + 1);
    Eigen::MatrixXd sq = -Eigen::MatrixXd::Identity(q + 1, q + 1);
    sp(0, 0) = 1.0;
    sq(0, 0) = 1.0;
    return {sp, sq};
}

OrthogonalPair rotation_pair(int p, int q, const std::string& factor, int plane_a, int plane_b,
                             long angle_num, long angle_den) {
    if (angle_den == 0) throw config_error("rotation: angle denominator must be nonzero");
    const double ang = M_PI * static_cast<double>(angle_num) / static_cast<double>(angle_den);
    OrthogonalPair g = identity_pair(p, q);
    Eigen::MatrixXd& m = (factor == "x") ? g.sigma_p : g.sigma_q;
    const int N = static_cast<int>(m.rows());
    if (factor != "x" && factor != "y") throw config_error("rotation: factor must be 'x' or 'y'");
    if (plane_a < 1 || plane_b < 1 || plane_a > N || plane_b > N || plane_a == plane_b)
        throw config_error("rotation: invalid plane for the chosen factor");
    const int a = plane_a - 1, b = plane_b - 1;
    m(a, a) = std::cos(ang);
    m(b, b) = std::cos(ang);
    m(a, b) = -std::sin(ang);
    m(b, a) = std::sin(ang);
    return g;
}

OrthogonalPair signs_pair(int p, int q, const std::vector<int>& x_signs,
                          const std::vector<int>& y_signs) {
    if (static_cast<int>(x_signs.size()) != p + 1 || static_cast<int>(y_signs.size()) != q + 1)
        throw config_error("signs: need p+1 x-signs and q+1 y-signs");
    OrthogonalPair g = identity_pair(p, q);
    for (int k = 0; k <= p; ++k) {
        if (x_signs[k] != 1 && x_signs[k] != -1) throw config_error("signs: entries must be +-1");
        g.sigma_p(k, k) = x_signs[k];
    }
    for (int k = 0; k <= q; ++k) {
        if (y_signs[k] != 1 && y_signs[k] != -1) throw config_error("signs: entries must be +-1");
        g.sigma_q(k, k) = y_signs[k];
    }
    return g;
}

OrthogonalPair compile_generator(int p, int q, const GeneratorSpec& spec) {
    if (spec.kind == "rho") return rho_pair(p, q);
    if (spec.kind == "rotation")
        return rotation_pair(p, q, spec.factor, spec.plane_a, spec.plane_b, spec.angle_num,
                             spec.angle_den);
    if (spec.kind == "signs") return signs_pair(p, q, spec.x_signs, spec.y_signs);
    if (spec.kind == "matrix") {
        check_orthogonal(spec.x_matrix, "generator x_matrix");
        check_orthogonal(spec.y_matrix, "generator y_matrix");
        if (spec.x_matrix.rows() != p + 1 || spec.y_matrix.rows() != q + 1)
            throw config_error("generator matrices have the wrong size for (p, q)");
        return {spec.x_matrix, spec.y_matrix};
    }
    throw config_error("unknown generator kind: " + spec.kind);
}

OrthogonalPair compose(const OrthogonalPair& g, const OrthogonalPair& h) {
    return {g.sigma_p * h.sigma_p, g.sigma_q * h.sigma_q};
}

Eigen::VectorXd base_point(int p, int q) {
    if (p < 1 || q < 1) throw std::domain_error("base_point: p, q must be >= 1");
    const double n = p + q;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(p + q + 2);
    v(0) = std::sqrt(p / n);
    v(p + 1) = std::sqrt(q / n);
    return v;
}

SymmetryGroup close_group(int p, int q, const std::vector<OrthogonalPair>& generators,
                          int order_cap) {
    if (order_cap < 1) throw std::domain_error("close_group: order_cap must be >= 1");
    for (const auto& g : generators) {
        check_orthogonal(g.sigma_p, "generator sigma_p");
        check_orthogonal(g.sigma_q, "generator sigma_q");
        if (g.sigma_p.rows() != p + 1 || g.sigma_q.rows() != q + 1)
            throw config_error("close_group: generator size mismatch with (p, q)");
    }

    SymmetryGroup G;
    G.p = p;
    G.q = q;
    G.elements.push_back(identity_pair(p, q));

    auto find = [&](const OrthogonalPair& g) {
        for (size_t k = 0; k < G.elements.size(); ++k)
            if (pair_equal(G.elements[k], g, kElementTol)) return static_cast<long>(k);
        return static_cast<long>(-1);
    };

    std::deque<size_t> work;
    for (const auto& g : generators) {
        if (find(g) < 0) {
            G.elements.push_back(g);
            work.push_back(G.elements.size() - 1);
        }
    }

    // breadth-first closure under right multiplication by the generators
    while (!work.empty()) {
        const size_t idx = work.front();
        work.pop_front();
        for (const auto& g : generators) {
            OrthogonalPair prod = compose(G.elements[idx], g);
            if (find(prod) < 0) {
                if (static_cast<int>(G.elements.size()) >= order_cap)
                    throw numeric_error("close_group: group not finite at this cap (reached "
                                        + std::to_string(G.elements.size()) + ")");
                G.elements.push_back(std::move(prod));
                work.push_back(G.elements.size() - 1);
            }
        }
    }

    // postcondition: inverse closure (transpose = inverse for orthogonal pairs)
    for (const auto& g : G.elements) {
        OrthogonalPair inv{g.sigma_p.transpose(), g.sigma_q.transpose()};
        if (find(inv) < 0)
            throw numeric_error("close_group: closure is not inverse-closed");
    }
    return G;
}

ProductPoint GluingSet::factor(int k) const {
    const Eigen::VectorXd& v = points.at(k);
    Eigen::VectorXd x = v.head(p + 1);
    Eigen::VectorXd y = v.tail(q + 1);
    return {x / x.norm(), y / y.norm()};
}

Eigen::VectorXd apply_pair(const OrthogonalPair& g, const Eigen::VectorXd& v, int p, int q) {
    Eigen::VectorXd out(v.size());
    out.head(p + 1) = g.sigma_p * v.head(p + 1);
    out.tail(q + 1) = g.sigma_q * v.tail(q + 1);
    return out;
}

GluingSet orbit(const SymmetryGroup& group, const Eigen::VectorXd& point, double dedupe_tol) {
    const int p = group.p, q = group.q;
    const double ts = minimal_angle(p, q);
    if (std::abs(point.head(p + 1).norm() - std::cos(ts)) > 1e-10
        || std::abs(point.tail(q + 1).norm() - std::sin(ts)) > 1e-10)
        throw std::domain_error("orbit: point does not lie on C_{t*}");

    GluingSet out;
    out.p = p;
    out.q = q;
    for (const auto& g : group.elements) {
        Eigen::VectorXd img = apply_pair(g, point, p, q);
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& existing : out.points)
            dmin = std::min(dmin, (existing - img).cwiseAbs().maxCoeff());
        if (dmin < dedupe_tol) continue;
        if (dmin < 10.0 * dedupe_tol)
            throw config_error("orbit: dedupe ambiguity, two distinct images separated by "
                               + std::to_string(dmin) + " (tol " + std::to_string(dedupe_tol)
                               + ")");
        out.points.push_back(std::move(img));
    }

    // orbit-stabilizer consistency
    const int stab = stabilizer_order(group, point);
    if (out.m() * stab != group.order())
        throw numeric_error("orbit: |orbit| * |stabilizer| != |G| (dedupe tolerance failure)");
    return out;
}

int stabilizer_order(const SymmetryGroup& group, const Eigen::VectorXd& point, double tol) {
    int cnt = 0;
    for (const auto& g : group.elements)
        if ((apply_pair(g, point, group.p, group.q) - point).cwiseAbs().maxCoeff() < tol) ++cnt;
    return cnt;
}

FixedBilinear fixed_bilinear_dimension(const SymmetryGroup& group) {
    const int P = group.p + 1, Q = group.q + 1;
    const int dim = P * Q;
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(dim, dim);
    double trace_sum = 0.0;
    for (const auto& g : group.elements) {
        // vec(sigma_p^T A sigma_q) = kron(sigma_q^T, sigma_p^T) vec(A)  (column-major vec)
        Eigen::MatrixXd K(dim, dim);
        for (int cq = 0; cq < Q; ++cq)
            for (int cp = 0; cp < P; ++cp)
                for (int rq = 0; rq < Q; ++rq)
                    for (int rp = 0; rp < P; ++rp)
                        K(rq * P + rp, cq * P + cp) = g.sigma_q(cq, rq) * g.sigma_p(cp, rp);
        R += K;
        trace_sum += g.sigma_p.trace() * g.sigma_q.trace();
    }
    R /= group.order();
    const double trace_formula = trace_sum / group.order();

    // fixed subspace = numerical kernel of (R - I)
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R - Eigen::MatrixXd::Identity(dim, dim),
                                          Eigen::ComputeFullV);
    int rank_fixed = 0;
    FixedBilinear out;
    for (int k = dim - 1; k >= 0; --k) {
        if (svd.singularValues()(k) < 0.5) {
            ++rank_fixed;
            Eigen::MatrixXd A(P, Q);
            const Eigen::VectorXd v = svd.matrixV().col(k);
            for (int cq = 0; cq < Q; ++cq)
                for (int rp = 0; rp < P; ++rp) A(rp, cq) = v(cq * P + rp);
            out.basis.push_back(A);
        } else {
            break; // singular values are sorted decreasing
        }
    }
    out.dimension = rank_fixed;
    out.trace_formula = trace_formula;
    if (std::abs(trace_formula - rank_fixed) >= 0.5)
        throw numeric_error("fixed_bilinear_dimension: Reynolds rank ("
                            + std::to_string(rank_fixed) + ") and trace formula ("
                            + std::to_string(trace_formula)
                            + ") disagree; dedupe tolerance failure suspected");
    return out;
}

bool contains_rho(const SymmetryGroup& group, double tol) {
    const OrthogonalPair rho = rho_pair(group.p, group.q);
    for (const auto& g : group.elements)
        if (pair_equal(g, rho, tol)) return true;
    return false;
}

Eigen::MatrixXd kernel_orthogonality_matrix(const GluingSet& gluing) {
    if (gluing.points.empty())
        throw std::domain_error("kernel_orthogonality_matrix: empty gluing set");
    const int P = gluing.p + 1, Q = gluing.q + 1;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(P, Q);
    for (const auto& v : gluing.points)
        M += v.head(P) * v.tail(Q).transpose();
    return M;
}

} // namespace cmcglue

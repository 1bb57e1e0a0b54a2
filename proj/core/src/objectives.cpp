#include "contexture/objectives.hpp"

#include "contexture/error.hpp"
#include "contexture/random.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace contexture {

namespace {

constexpr double kConstraintTolerance = 1e-6;

const std::array<const char*, 9> kObjectiveNames = {
    "supervised_unbiased",      "supervised_balanced",      "regression_biased",
    "regression_unbiased",      "multiview_contrastive",    "multiview_noncontrastive",
    "reconstruction_biased",    "reconstruction_unbiased",  "node_embedding",
};

bool is_least_squares(ObjectiveKind k) {
    switch (k) {
    case ObjectiveKind::multiview_contrastive:
    case ObjectiveKind::multiview_noncontrastive:
    case ObjectiveKind::node_embedding: return false;
    default: return true;
    }
}

bool is_constrained(ObjectiveKind k) {
    return k == ObjectiveKind::multiview_noncontrastive || k == ObjectiveKind::node_embedding;
}

bool has_bias(ObjectiveKind k) {
    return k == ObjectiveKind::supervised_balanced || k == ObjectiveKind::regression_biased ||
           k == ObjectiveKind::reconstruction_biased;
}

// Weighted least-squares form of an objective: value = constant + min over
// the head of sum_x weights_x |W phi(x) + b - targets_x|^2.
struct LeastSquaresSetup {
    Vector weights;
    Matrix targets;
    double constant = 0.0;
    bool bias = false;
};

LeastSquaresSetup least_squares_setup(ObjectiveKind k, const FiniteContext& ctx, const AuxVectors& aux) {
    const Matrix& t = ctx.conditional();
    const Vector& p = ctx.input_marginal().weights();
    const Vector& q = ctx.context_marginal().weights();
    const Index n = ctx.n_inputs();
    const Index m = ctx.n_context();
    LeastSquaresSetup s;
    s.bias = has_bias(k);
    switch (k) {
    case ObjectiveKind::supervised_unbiased: {
        s.weights = p;
        s.targets = t;
        s.constant = 1.0 - (t.rowwise().squaredNorm().array() * p.array()).sum();
        break;
    }
    case ObjectiveKind::supervised_balanced: {
        // Per x, sum_a Q[x,a] q_a^-1/2 |z - e_a|^2 = omega_x |z - r_x|^2 + c_x.
        const Vector inv_sqrt_q = q.cwiseSqrt().cwiseInverse();
        const Matrix scaled = t * inv_sqrt_q.asDiagonal();
        const Vector omega = scaled.rowwise().sum();
        s.targets = omega.cwiseInverse().asDiagonal() * scaled;
        s.weights = p.cwiseProduct(omega);
        double c = 0.0;
        for (Index x = 0; x < n; ++x) c += p(x) * (omega(x) - omega(x) * s.targets.row(x).squaredNorm());
        s.constant = c;
        break;
    }
    case ObjectiveKind::regression_biased:
    case ObjectiveKind::regression_unbiased: {
        const Matrix c = aux ? *aux : Matrix(Matrix::Identity(m, m));
        if (c.rows() != m)
            throw InvalidArgument("regression objective: aux needs one row per context point (" + std::to_string(m) + ")");
        s.weights = p;
        s.targets = t * c;
        s.constant = (c.rowwise().squaredNorm().array() * q.array()).sum() -
                     (s.targets.rowwise().squaredNorm().array() * p.array()).sum();
        break;
    }
    case ObjectiveKind::reconstruction_biased:
    case ObjectiveKind::reconstruction_unbiased: {
        const Matrix xv = aux ? *aux : Matrix(Matrix::Identity(n, n));
        if (xv.rows() != n)
            throw InvalidArgument("reconstruction objective: aux needs one row per input point (" + std::to_string(n) + ")");
        s.weights = q;
        s.targets = operator_matrices(ctx).adjoint * xv;
        s.constant = (xv.rowwise().squaredNorm().array() * p.array()).sum() -
                     (s.targets.rowwise().squaredNorm().array() * q.array()).sum();
        break;
    }
    default: throw InvalidArgument("objective has no least-squares form");
    }
    return s;
}

const Vector& support_weights(ObjectiveKind k, const FiniteContext& ctx) {
    return objective_support(k) == Support::input ? ctx.input_marginal().weights() : ctx.context_marginal().weights();
}

void require_graph_like(const FiniteContext& ctx) {
    bool ok = ctx.shares_input_support() && ctx.n_context() == ctx.n_inputs();
    for (Index j = 0; ok && j < ctx.n_context(); ++j) ok = ctx.context_ids()[static_cast<std::size_t>(j)] == j;
    if (!ok) throw InvalidArgument("node_embedding requires a context whose context support is the input support");
}

// 1/2 E_{(u,v)} |phi(u) - phi(v)|^2 = tr(Phi^T L Phi).
Matrix node_loss_matrix(const FiniteContext& ctx) {
    const Vector& p = ctx.input_marginal().weights();
    const Vector& q = ctx.context_marginal().weights();
    const Matrix pq = p.asDiagonal() * ctx.conditional();
    Matrix l = -0.5 * (pq + pq.transpose());
    l.diagonal() += 0.5 * (p + q);
    return l;
}

Matrix positive_pair_joint(const FiniteContext& ctx) {
    const Matrix& t = ctx.conditional();
    return symmetrize(t.transpose() * ctx.input_marginal().weights().asDiagonal() * t);
}

Matrix complement_of(const Vector& unit, Index count) {
    Eigen::HouseholderQR<Matrix> qr{Matrix(unit)};
    const Matrix q = qr.householderQ() * Matrix::Identity(unit.size(), 1 + count);
    return q.rightCols(count);
}

// Eigenfunctions of f -> K diag(w) f in L2(w), ordered by eigenvalue
// (descending, or ascending when `smallest`).
std::pair<Matrix, Vector> kernel_eigenfunctions(const Matrix& k, const Vector& w, Index d, bool exclude_constant,
                                                bool smallest = false) {
    const Index n = k.rows();
    if ((w.array() <= 0.0).any()) throw InvalidArgument("objective: support weights must be positive");
    const Index avail = exclude_constant ? n - 1 : n;
    if (d < 1 || d > avail)
        throw InvalidArgument("objective: d = " + std::to_string(d) + " exceeds the " + std::to_string(avail) +
                              " available directions");
    const Vector sw = w.cwiseSqrt();
    Matrix s = sw.asDiagonal() * k * sw.asDiagonal();
    Matrix basis;
    if (exclude_constant) {
        basis = complement_of(sw / sw.norm(), n - 1);
        s = basis.transpose() * s * basis;
    }
    SymmetricEigen eig = symmetric_eigen_descending(s);
    if (smallest) {
        eig.values = eig.values.reverse().eval();
        eig.vectors = eig.vectors.rowwise().reverse().eval();
    }
    Matrix vecs = eig.vectors.leftCols(d);
    if (exclude_constant) vecs = basis * vecs;
    Matrix f = sw.cwiseInverse().asDiagonal() * vecs;
    return {f, eig.values.head(d)};
}

void check_rank(const Vector& values, Index d) {
    const double top = std::max(std::abs(values(0)), std::numeric_limits<double>::min());
    if (!(values(d - 1) > 1e-12 * top))
        throw InvalidArgument("objective: d = " + std::to_string(d) + " exceeds the rank of the objective's operator");
}

Matrix symmetric_inverse_sqrt(const Matrix& c, bool& ok) {
    const SymmetricEigen eig = symmetric_eigen_descending(c);
    const Index d = eig.values.size();
    ok = d > 0 && eig.values(d - 1) > 1e-13 * std::max(eig.values(0), 0.0) && eig.values(d - 1) > 0.0;
    if (!ok) return Matrix();
    return eig.vectors * eig.values.cwiseSqrt().cwiseInverse().asDiagonal() * eig.vectors.transpose();
}

double cov_deviation(const Matrix& v, const Vector& w) {
    return (weighted_covariance(v, w) - Matrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
}

// Gradient-descent state for one objective.
class Problem {
public:
    Problem(ObjectiveKind kind, const FiniteContext& ctx, const AuxVectors& aux, const VariationalOptions& opts)
        : kind_(kind), penalty_(opts.constraint_mode == ConstraintMode::penalty && is_constrained(kind)),
          kappa_(opts.penalty_weight) {
        w_ = support_weights(kind, ctx);
        if (is_least_squares(kind)) {
            ls_ = least_squares_setup(kind, ctx, aux);
        } else if (kind == ObjectiveKind::node_embedding) {
            require_graph_like(ctx);
            quad_ = node_loss_matrix(ctx);
        } else {
            quad_ = positive_pair_joint(ctx);
        }
    }

    Index size() const { return w_.size(); }
    const Vector& weights() const { return w_; }

    // Maps an arbitrary iterate to its canonical representative; false when
    // the iterate has lost rank.
    bool retract(Matrix& v) const {
        if (is_least_squares(kind_) && !has_bias(kind_)) {
            bool ok = false;
            const Matrix r = symmetric_inverse_sqrt(weighted_gram(v, w_), ok);
            if (ok) v = v * r;
            return ok;
        }
        v = weighted_center(v, w_);
        if (is_least_squares(kind_) || (is_constrained(kind_) && !penalty_)) {
            bool ok = false;
            const Matrix r = symmetric_inverse_sqrt(weighted_gram(v, w_), ok);
            if (ok) v = v * r;
            return ok;
        }
        return true;
    }

    void finalize(Matrix& v) const {
        if (!penalty_) return;
        v = weighted_center(v, w_);
        bool ok = false;
        const Matrix r = symmetric_inverse_sqrt(weighted_gram(v, w_), ok);
        if (!ok) throw NumericalError("solve_variational: final iterate is rank deficient");
        v = v * r;
    }

    double value(const Matrix& v) const {
        double f = 0.0;
        if (is_least_squares(kind_)) {
            f = ls_.constant + weighted_least_squares(v, ls_.targets, ls_.weights, ls_.bias).residual;
        } else if (kind_ == ObjectiveKind::multiview_contrastive) {
            const Matrix vc = weighted_center(v, w_);
            const Matrix s = weighted_gram(vc, w_);
            f = -(vc.transpose() * quad_ * vc).trace() + 0.5 * s.squaredNorm();
        } else if (kind_ == ObjectiveKind::multiview_noncontrastive) {
            f = 2.0 * weighted_gram(v, w_).trace() - 2.0 * (v.transpose() * quad_ * v).trace();
        } else {
            f = (v.transpose() * quad_ * v).trace();
        }
        if (penalty_) {
            const Matrix dev = weighted_covariance(v, w_) - Matrix::Identity(v.cols(), v.cols());
            f += kappa_ * dev.squaredNorm();
        }
        return f;
    }

    // Gradient in L2(w).
    Matrix gradient(const Matrix& v) const {
        const Vector inv_w = w_.cwiseInverse();
        Matrix g;
        if (is_least_squares(kind_)) {
            const LeastSquaresFit fit = weighted_least_squares(v, ls_.targets, ls_.weights, ls_.bias);
            Matrix resid = v * fit.coefficients - ls_.targets;
            if (ls_.bias) resid.rowwise() += fit.intercept.transpose();
            g = 2.0 * (ls_.weights.cwiseProduct(inv_w)).asDiagonal() * resid * fit.coefficients.transpose();
        } else if (kind_ == ObjectiveKind::multiview_contrastive) {
            const Matrix vc = weighted_center(v, w_);
            const Matrix s = weighted_gram(vc, w_);
            const Matrix z = -2.0 * quad_ * vc + 2.0 * w_.asDiagonal() * vc * s;
            g = inv_w.asDiagonal() * z;
            g.rowwise() -= z.colwise().sum();
        } else if (kind_ == ObjectiveKind::multiview_noncontrastive) {
            g = 4.0 * v - 4.0 * inv_w.asDiagonal() * (quad_ * v);
        } else {
            g = 2.0 * inv_w.asDiagonal() * (quad_ * v);
        }
        if (penalty_) {
            const Matrix vc = weighted_center(v, w_);
            const Matrix dev = weighted_gram(vc, w_) - Matrix::Identity(v.cols(), v.cols());
            g += 4.0 * kappa_ * vc * dev;
        } else if (is_constrained(kind_)) {
            // Project onto the tangent space of {Cov = I} at a whitened iterate.
            g = weighted_center(g, w_);
            const Matrix vc = weighted_center(v, w_);
            g -= vc * symmetrize(weighted_gram(vc, g, w_));
        }
        return g;
    }

private:
    ObjectiveKind kind_;
    bool penalty_;
    double kappa_;
    Vector w_;
    LeastSquaresSetup ls_;
    Matrix quad_;
};

} // namespace

SampleEncoder::SampleEncoder(Matrix values, DiscreteDistribution marginal, Support support)
    : values_(std::move(values)), marginal_(std::move(marginal)), support_(support) {
    if (values_.cols() < 1) throw InvalidArgument("SampleEncoder: d must be at least 1");
    if (values_.rows() != marginal_.size())
        throw InvalidArgument("SampleEncoder: " + std::to_string(values_.rows()) + " rows but marginal has " +
                              std::to_string(marginal_.size()) + " entries");
    if (!values_.allFinite()) throw InvalidArgument("SampleEncoder: non-finite value");
    mean_ = weighted_mean(values_, marginal_.weights());
    covariance_ = weighted_covariance(values_, marginal_.weights());
}

Matrix SampleEncoder::centered() const { return values_.rowwise() - mean_.transpose(); }

SampleEncoder top_encoder(const ContextureSpectrum& spec, Index d) {
    return SampleEncoder(spec.top_left(d), spec.input_marginal, Support::input);
}

Matrix loss_kernel_matrix(LossKernelKind kind, const Matrix& context_vectors, const DiscreteDistribution& marginal) {
    const Index m = context_vectors.rows();
    if (m != marginal.size()) throw InvalidArgument("loss_kernel_matrix: marginal size mismatch");
    if (context_vectors.cols() < 1) throw InvalidArgument("loss_kernel_matrix: empty context vectors");
    switch (kind) {
    case LossKernelKind::indicator: {
        Matrix k(m, m);
        for (Index a = 0; a < m; ++a)
            for (Index b = 0; b < m; ++b) k(a, b) = context_vectors.row(a) == context_vectors.row(b) ? 1.0 : 0.0;
        return k;
    }
    case LossKernelKind::linear: return symmetrize(context_vectors * context_vectors.transpose());
    case LossKernelKind::centered_linear: {
        const Matrix c = weighted_center(context_vectors, marginal.weights());
        return symmetrize(c * c.transpose());
    }
    }
    throw InvalidArgument("loss_kernel_matrix: unknown kind");
}

std::string to_string(ObjectiveKind kind) { return kObjectiveNames[static_cast<std::size_t>(kind)]; }

ObjectiveKind parse_objective(const std::string& name) {
    for (std::size_t i = 0; i < kObjectiveNames.size(); ++i)
        if (name == kObjectiveNames[i]) return static_cast<ObjectiveKind>(i);
    throw InvalidArgument("unknown objective '" + name + "'");
}

Support objective_support(ObjectiveKind kind) {
    switch (kind) {
    case ObjectiveKind::multiview_contrastive:
    case ObjectiveKind::multiview_noncontrastive:
    case ObjectiveKind::reconstruction_biased:
    case ObjectiveKind::reconstruction_unbiased: return Support::context;
    default: return Support::input;
    }
}

bool objective_is_centered(ObjectiveKind kind) {
    return !(kind == ObjectiveKind::supervised_unbiased || kind == ObjectiveKind::regression_unbiased ||
             kind == ObjectiveKind::reconstruction_unbiased);
}

LeastSquaresFit weighted_least_squares(const Matrix& design, const Matrix& targets, const Vector& weights, bool bias) {
    const Index n = design.rows();
    if (targets.rows() != n || weights.size() != n) throw InvalidArgument("weighted_least_squares: row count mismatch");
    const Index d = design.cols();
    Matrix z(n, d + (bias ? 1 : 0));
    z.leftCols(d) = design;
    if (bias) z.col(d).setOnes();
    const Vector sw = weights.cwiseSqrt();
    const Matrix zw = sw.asDiagonal() * z;
    const Matrix yw = sw.asDiagonal() * targets;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(zw);
    cod.setThreshold(1e-12);
    const Matrix coef = cod.solve(yw);
    LeastSquaresFit fit;
    fit.pseudo_inverse = cod.rank() < z.cols();
    fit.coefficients = coef.topRows(d);
    fit.intercept = bias ? Vector(coef.row(d).transpose()) : Vector::Zero(targets.cols());
    fit.residual = (zw * coef - yw).squaredNorm();
    return fit;
}

SpectralSolution solve_spectral(ObjectiveKind objective, const FiniteContext& ctx, Index d, const AuxVectors& aux) {
    if (d < 1) throw InvalidArgument("solve_spectral: d must be at least 1");
    const Vector& p = ctx.input_marginal().weights();
    const Vector& q = ctx.context_marginal().weights();
    const Matrix& t = ctx.conditional();
    SpectralSolution out;
    switch (objective) {
    case ObjectiveKind::supervised_unbiased:
    case ObjectiveKind::regression_unbiased:
    case ObjectiveKind::regression_biased: {
        Matrix c = Matrix::Identity(ctx.n_context(), ctx.n_context());
        LossKernelKind kind = LossKernelKind::indicator;
        if (objective != ObjectiveKind::supervised_unbiased) {
            if (aux) c = *aux;
            if (c.rows() != ctx.n_context()) throw InvalidArgument("regression objective: aux row count mismatch");
            kind = objective == ObjectiveKind::regression_biased ? LossKernelKind::centered_linear : LossKernelKind::linear;
        }
        const Matrix k = t * loss_kernel_matrix(kind, c, ctx.context_marginal()) * t.transpose();
        auto [f, vals] = kernel_eigenfunctions(symmetrize(k), p, d, has_bias(objective));
        check_rank(vals, d);
        out.encoder = SampleEncoder(std::move(f), ctx.input_marginal(), Support::input);
        out.eigenvalues = vals;
        return out;
    }
    case ObjectiveKind::reconstruction_unbiased:
    case ObjectiveKind::reconstruction_biased: {
        Matrix xv = aux ? *aux : Matrix(Matrix::Identity(ctx.n_inputs(), ctx.n_inputs()));
        if (xv.rows() != ctx.n_inputs()) throw InvalidArgument("reconstruction objective: aux row count mismatch");
        const LossKernelKind kind =
            objective == ObjectiveKind::reconstruction_biased ? LossKernelKind::centered_linear : LossKernelKind::linear;
        const Matrix adj = operator_matrices(ctx).adjoint;
        const Matrix k = adj * loss_kernel_matrix(kind, xv, ctx.input_marginal()) * adj.transpose();
        auto [f, vals] = kernel_eigenfunctions(symmetrize(k), q, d, has_bias(objective));
        check_rank(vals, d);
        out.encoder = SampleEncoder(std::move(f), ctx.context_marginal(), Support::context);
        out.eigenvalues = vals;
        return out;
    }
    case ObjectiveKind::supervised_balanced: {
        const LeastSquaresSetup s = least_squares_setup(objective, ctx, aux);
        const Vector w = s.weights / s.weights.sum();
        const Matrix y = weighted_center(s.targets, w);
        auto [f, vals] = kernel_eigenfunctions(symmetrize(y * y.transpose()), s.weights, d, true);
        check_rank(vals, d);
        out.encoder = SampleEncoder(std::move(f), ctx.input_marginal(), Support::input);
        out.eigenvalues = vals;
        return out;
    }
    case ObjectiveKind::multiview_contrastive:
    case ObjectiveKind::multiview_noncontrastive: {
        const Index full = std::min(ctx.n_inputs(), ctx.n_context());
        if (d + 1 > full)
            throw InvalidArgument("solve_spectral: d = " + std::to_string(d) + " exceeds the " +
                                  std::to_string(full - 1) + " nontrivial modes");
        const ContextureSpectrum spec = contexture_svd(ctx, d + 1);
        if (spec.clamped[static_cast<std::size_t>(d)])
            throw InvalidArgument("solve_spectral: d exceeds the rank of the expectation operator");
        const Vector s = spec.singular_values.segment(1, d);
        Matrix psi = spec.right.middleCols(1, d);
        if (objective == ObjectiveKind::multiview_contrastive) psi = psi * s.asDiagonal();
        out.encoder = SampleEncoder(std::move(psi), ctx.context_marginal(), Support::context);
        out.eigenvalues = s;
        return out;
    }
    case ObjectiveKind::node_embedding: {
        require_graph_like(ctx);
        // Generalized problem L v = lambda D_p v, smallest nontrivial lambda.
        const Vector inv_p = p.cwiseInverse();
        const Matrix k = inv_p.asDiagonal() * node_loss_matrix(ctx) * inv_p.asDiagonal();
        auto [f, lambda] = kernel_eigenfunctions(symmetrize(k), p, d, true, true);
        out.encoder = SampleEncoder(std::move(f), ctx.input_marginal(), Support::input);
        out.eigenvalues = Vector::Ones(d) - lambda;
        return out;
    }
    }
    throw InvalidArgument("solve_spectral: unknown objective");
}

VariationalSolution solve_variational(ObjectiveKind objective, const FiniteContext& ctx, Index d,
                                      const VariationalOptions& opts, const AuxVectors& aux) {
    if (opts.steps < 1) throw InvalidArgument("solve_variational: steps must be at least 1");
    if (!(opts.learning_rate > 0.0)) throw InvalidArgument("solve_variational: learning_rate must be positive");
    const Problem problem(objective, ctx, aux, opts);
    const Index n = problem.size();
    if (d < 1 || d >= n) throw InvalidArgument("solve_variational: d must lie in [1, support size - 1]");
    const Vector& w = problem.weights();

    Rng rng(opts.seed);
    Matrix v(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) v(i, j) = rng.normal();
    if (!problem.retract(v)) throw NumericalError("solve_variational: degenerate initialization");

    VariationalSolution out;
    double f = problem.value(v);
    out.trace.push_back(f);
    double lr = opts.learning_rate;
    Index rejected = 0;
    for (Index step = 0; step < opts.steps; ++step) {
        out.iterations = step + 1;
        const Matrix g = problem.gradient(v);
        const double gnorm = std::sqrt((g.rowwise().squaredNorm().array() * w.array()).sum());
        if (gnorm <= opts.gradient_tolerance) {
            out.converged = true;
            break;
        }
        Matrix candidate = v - lr * g;
        const bool ok = problem.retract(candidate);
        const double fc = ok ? problem.value(candidate) : std::numeric_limits<double>::infinity();
        if (std::isfinite(fc) && fc <= f) {
            v = std::move(candidate);
            f = fc;
            out.trace.push_back(f);
            lr = std::min(lr * 1.5, 1e6);
            rejected = 0;
        } else {
            lr *= 0.5;
            if (++rejected >= 100) {
                if (gnorm < 1e-6) {
                    out.converged = true;
                    break;
                }
                throw DivergenceError("solve_variational: objective failed to decrease for 100 consecutive steps",
                                      out.trace);
            }
        }
    }
    problem.finalize(v);
    const Support support = objective_support(objective);
    out.encoder = SampleEncoder(std::move(v),
                                support == Support::input ? ctx.input_marginal() : ctx.context_marginal(), support);
    return out;
}

SampleEncoder average_encoder(const FiniteContext& ctx, const SampleEncoder& psi) {
    if (psi.support() != Support::context) throw InvalidArgument("average_encoder: encoder must live on the context support");
    if (psi.size() != ctx.n_context())
        throw InvalidArgument("average_encoder: encoder has " + std::to_string(psi.size()) + " rows, context has " +
                              std::to_string(ctx.n_context()));
    return SampleEncoder(ctx.conditional() * psi.values(), ctx.input_marginal(), Support::input);
}

ObjectiveValue eval_objective_detailed(ObjectiveKind objective, const FiniteContext& ctx, const SampleEncoder& enc,
                                       const AuxVectors& aux) {
    const Support support = objective_support(objective);
    const Index n = support == Support::input ? ctx.n_inputs() : ctx.n_context();
    if (enc.support() != support || enc.size() != n)
        throw InvalidArgument("eval_objective: encoder is not on the " +
                              std::string(support == Support::input ? "input" : "context") + " support of the context");
    const Vector& w = support_weights(objective, ctx);
    const Matrix& v = enc.values();
    ObjectiveValue out;
    if (is_least_squares(objective)) {
        const LeastSquaresSetup s = least_squares_setup(objective, ctx, aux);
        const LeastSquaresFit fit = weighted_least_squares(v, s.targets, s.weights, s.bias);
        out.value = s.constant + fit.residual;
        out.pseudo_inverse = fit.pseudo_inverse;
        return out;
    }
    if (is_constrained(objective) && cov_deviation(v, w) > kConstraintTolerance)
        throw ConstraintViolation("eval_objective: " + to_string(objective) + " requires Cov[encoder] = I");
    if (objective == ObjectiveKind::multiview_contrastive) {
        const Matrix vc = weighted_center(v, w);
        out.value = -(vc.transpose() * positive_pair_joint(ctx) * vc).trace() + 0.5 * weighted_gram(vc, w).squaredNorm();
    } else if (objective == ObjectiveKind::multiview_noncontrastive) {
        out.value = 2.0 * weighted_gram(v, w).trace() - 2.0 * (v.transpose() * positive_pair_joint(ctx) * v).trace();
    } else {
        require_graph_like(ctx);
        out.value = (v.transpose() * node_loss_matrix(ctx) * v).trace();
    }
    return out;
}

double eval_objective(ObjectiveKind objective, const FiniteContext& ctx, const SampleEncoder& enc,
                      const AuxVectors& aux) {
    return eval_objective_detailed(objective, ctx, enc, aux).value;
}

} // namespace contexture

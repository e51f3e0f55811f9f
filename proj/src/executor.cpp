#include "atm/executor.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace atm {

double LinearDynamics::lipschitz() const {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    return svd.singularValues()(0);
}

Eigen::VectorXd LinearDynamics::input_for(const std::string& action) const {
    if (auto it = inputs.find(action); it != inputs.end()) return it->second;
    return Eigen::VectorXd::Zero(B.cols());
}

void LinearDynamics::validate() const {
    require(A.rows() > 0 && A.rows() == A.cols(), "dynamics: A must be square and non-empty");
    require(B.rows() == A.rows(), "dynamics: B must have as many rows as A");
    require(noise_sigma >= 0.0 && std::isfinite(noise_sigma), "dynamics: noise sigma must be finite and >= 0");
    for (const auto& [action, u] : inputs) {
        require(u.size() == B.cols(), "dynamics: input for '" + action + "' has wrong dimension");
    }
}

LinearDynamics LinearDynamics::scaled_identity(std::size_t dim, double l_f, double sigma) {
    LinearDynamics dyn;
    const auto d = static_cast<Eigen::Index>(dim);
    dyn.A = l_f * Eigen::MatrixXd::Identity(d, d);
    dyn.B = Eigen::MatrixXd::Identity(d, d);
    dyn.noise_sigma = sigma;
    return dyn;
}

namespace {

Eigen::VectorXd to_eigen(const Vec& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vec to_vec(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

// Contraction step shared by the inline replanner and the scripted planner's
// checkpoint replan, so both routes produce bit-identical traces.
using ContractFn = std::function<void(Eigen::VectorXd& x_hat, const Eigen::VectorXd& x, const PlanStage& stage)>;

PlanErrorTrace run(const DraftPlan& plan, const LinearDynamics& dyn, const ReplannerConfig& replanner,
                   std::int64_t steps, std::uint64_t rng_seed, const ContractFn& contract) {
    require(steps >= 1, "execute_with_checkpoints: steps must be >= 1");
    require(!plan.stages.empty(), "execute_with_checkpoints: plan has no stages");
    require(plan.checkpoint_every >= 1, "execute_with_checkpoints: checkpoint_every must be >= 1");
    require(plan.theta_ckpt >= 0.0, "execute_with_checkpoints: theta_ckpt must be >= 0");
    require(replanner.rho >= 0.0 && replanner.rho < 1.0, "execute_with_checkpoints: rho must lie in [0, 1)");
    dyn.validate();

    const Eigen::Index d = dyn.A.rows();
    require(static_cast<Eigen::Index>(plan.stages.front().expected_env.features.size()) == d,
            "execute_with_checkpoints: plan state dimension does not match dynamics");

    Rng rng(rng_seed);
    const double coord_sd = dyn.noise_sigma / std::sqrt(static_cast<double>(d));
    Eigen::VectorXd x = to_eigen(plan.stages.front().expected_env.features);
    Eigen::VectorXd x_hat = x;
    Eigen::VectorXd noise(d);

    PlanErrorTrace trace;
    trace.errors.reserve(static_cast<std::size_t>(steps));
    trace.err_sq.reserve(static_cast<std::size_t>(steps));
    trace.checkpointed.reserve(static_cast<std::size_t>(steps));

    for (std::int64_t t = 0; t < steps; ++t) {
        const PlanStage& stage = plan.stages[static_cast<std::size_t>(t) % plan.stages.size()];
        bool checkpointed = false;
        if (replanner.enabled && t % plan.checkpoint_every == 0 && (x_hat - x).norm() > plan.theta_ckpt) {
            contract(x_hat, x, stage);
            checkpointed = true;
        }
        const Eigen::VectorXd u = dyn.input_for(stage.action);
        for (Eigen::Index k = 0; k < d; ++k) noise(k) = coord_sd * rng.normal();
        x = dyn.A * x + dyn.B * u + noise;
        x_hat = dyn.A * x_hat + dyn.B * u;
        if (!x.allFinite() || !x_hat.allFinite()) {
            throw DivergenceError("execute_with_checkpoints: non-finite state at step " + std::to_string(t + 1));
        }
        const Eigen::VectorXd e = x - x_hat;
        trace.errors.push_back(to_vec(e));
        trace.err_sq.push_back(e.squaredNorm());
        trace.checkpointed.push_back(checkpointed);
    }
    return trace;
}

}  // namespace

PlanErrorTrace execute_with_checkpoints(const DraftPlan& plan, const LinearDynamics& dyn,
                                        const ReplannerConfig& replanner, std::int64_t steps,
                                        std::uint64_t rng_seed) {
    const double keep = 1.0 - replanner.rho;
    return run(plan, dyn, replanner, steps, rng_seed,
               [keep](Eigen::VectorXd& x_hat, const Eigen::VectorXd& x, const PlanStage&) {
                   const Eigen::VectorXd deviation = x_hat - x;
                   for (Eigen::Index k = 0; k < x_hat.size(); ++k) x_hat(k) -= keep * deviation(k);
               });
}

PlanErrorTrace execute_with_checkpoints(const DraftPlan& plan, const LinearDynamics& dyn,
                                        const ReplannerConfig& replanner, std::int64_t steps,
                                        std::uint64_t rng_seed, PlannerPort& planner) {
    return run(plan, dyn, replanner, steps, rng_seed,
               [&](Eigen::VectorXd& x_hat, const Eigen::VectorXd& x, const PlanStage& stage) {
                   PlanRequest request;
                   request.kind = PlanKind::Replan;
                   request.env.features = to_vec(x);
                   ReplanContext ctx;
                   ctx.trigger = ReplanTrigger::Checkpoint;
                   ctx.observed_env.features = to_vec(x);
                   ctx.deviation = to_vec(x_hat - x);
                   ctx.remaining.push_back({EnvState{to_vec(x_hat), 0}, stage.action});
                   ctx.rho = replanner.rho;
                   request.context = std::move(ctx);
                   const PlanResponse response = planner.handle(request);
                   if (response.expected_envs.empty() ||
                       static_cast<Eigen::Index>(response.expected_envs.front().features.size()) != x_hat.size()) {
                       throw PlannerError(PlannerError::Kind::Schema, "checkpoint replan returned no usable stage");
                   }
                   x_hat = to_eigen(response.expected_envs.front().features);
               });
}

double checkpoint_deviation(const EnvState& x, const EnvState& x_hat) {
    return distance(x.features, x_hat.features, Norm::L2);
}

double reward_gap(const PlanErrorTrace& trace, double l_r) {
    require(!trace.err_sq.empty(), "reward_gap: empty trace");
    require(l_r > 0.0, "reward_gap: L_r must be > 0");
    double sum = 0.0;
    for (double v : trace.err_sq) sum += v;
    return l_r * std::sqrt(sum / static_cast<double>(trace.err_sq.size()));
}

double steady_state_mse(const PlanErrorTrace& trace, std::size_t tail) {
    require(!trace.err_sq.empty() && tail > 0, "steady_state_mse: empty window");
    const std::size_t n = std::min(tail, trace.err_sq.size());
    double sum = 0.0;
    for (std::size_t i = trace.err_sq.size() - n; i < trace.err_sq.size(); ++i) sum += trace.err_sq[i];
    return sum / static_cast<double>(n);
}

double checkpoint_mse_bound(double sigma, double rho, double l_f) {
    const double c = rho * l_f;
    if (c >= 1.0) return std::numeric_limits<double>::infinity();
    return sigma * sigma / (1.0 - c * c);
}

double open_loop_mse(double sigma, double l_f) { return checkpoint_mse_bound(sigma, 1.0, l_f); }

}  // namespace atm

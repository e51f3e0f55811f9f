#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "atm/common.hpp"
#include "atm/planner.hpp"
#include "atm/world.hpp"

namespace atm {

// Raised when a simulated state stops being finite.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// x_{t+1} = A x_t + B u(a_t) + w_t with isotropic Gaussian w_t, E||w||^2 = sigma^2.
struct LinearDynamics {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    double noise_sigma = 0.0;
    std::map<std::string, Eigen::VectorXd> inputs;  // action -> u

    // Spectral norm of A.
    double lipschitz() const;
    // Zero input for actions with no entry.
    Eigen::VectorXd input_for(const std::string& action) const;
    void validate() const;

    static LinearDynamics scaled_identity(std::size_t dim, double l_f, double sigma);
};

struct DraftPlan {
    std::vector<PlanStage> stages;
    std::int64_t checkpoint_every = 1;
    double theta_ckpt = 0.0;
};

struct ReplannerConfig {
    double rho = 0.5;
    bool enabled = true;  // false = open-loop execution, no checkpoints
};

struct PlanErrorTrace {
    std::vector<Vec> errors;         // e_{t+1} = x_{t+1} - xhat_{t+1}
    std::vector<double> err_sq;      // ||e_{t+1}||^2
    std::vector<bool> checkpointed;  // a replan was applied before step t's propagation
};

/// Runs `steps` transitions of the plan, cycling through its stages.
///
/// Both the true and predicted states start at the first stage's expected
/// env. At every checkpoint step whose deviation exceeds theta_ckpt the
/// prediction is contracted toward the observation,
/// xhat <- xhat - (1 - rho)(xhat - x), before propagating.
PlanErrorTrace execute_with_checkpoints(const DraftPlan& plan, const LinearDynamics& dyn,
                                        const ReplannerConfig& replanner, std::int64_t steps,
                                        std::uint64_t rng_seed);

// Same run, with each contraction obtained from a checkpoint replan request.
PlanErrorTrace execute_with_checkpoints(const DraftPlan& plan, const LinearDynamics& dyn,
                                        const ReplannerConfig& replanner, std::int64_t steps,
                                        std::uint64_t rng_seed, PlannerPort& planner);

double checkpoint_deviation(const EnvState& x, const EnvState& x_hat);

// L_r * sqrt(mean ||e||^2).
double reward_gap(const PlanErrorTrace& trace, double l_r);

// Mean of the last `tail` squared error norms (all of them when tail exceeds the trace).
double steady_state_mse(const PlanErrorTrace& trace, std::size_t tail);

// sigma^2 / (1 - rho^2 L_F^2); infinite when rho L_F >= 1.
double checkpoint_mse_bound(double sigma, double rho, double l_f);
// sigma^2 / (1 - L_F^2); infinite when L_F >= 1.
double open_loop_mse(double sigma, double l_f);

}  // namespace atm

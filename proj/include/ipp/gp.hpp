#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "ipp/location.hpp"

namespace ipp {

// Matern nu=3/2 covariance over Euclidean cell distance.
struct KernelParams {
    double length_scale = 1.0;
    double signal_variance = 1.0;
    double jitter = 1e-8;

    void validate() const;
};

struct Observation {
    Location loc;
    double value = 0.0;
};

struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
};

using VarianceMap = std::unordered_map<Location, double, LocationHash>;

double matern32(double r, const KernelParams& params);

// Exact GP posterior. Immutable after fit(); all const members are safe to call
// concurrently.
class GpModel {
public:
    // Prior-only model.
    explicit GpModel(KernelParams params = {});

    const KernelParams& params() const { return params_; }
    const std::vector<Observation>& observations() const { return observations_; }
    bool empty() const { return observations_.empty(); }
    // Diagonal term actually used; may exceed params().jitter after escalation.
    double effective_jitter() const { return jitter_; }
    const Eigen::MatrixXd& cholesky() const { return chol_; }
    const Eigen::VectorXd& weights() const { return alpha_; }

    friend GpModel fit(std::vector<Observation> observations, const KernelParams& params);

private:
    KernelParams params_;
    std::vector<Observation> observations_;
    double jitter_ = 0.0;
    Eigen::MatrixXd chol_;   // lower triangular
    Eigen::VectorXd alpha_;
};

// Throws ParameterError on duplicate locations and NumericalError if the
// factorization fails even with escalated jitter.
GpModel fit(std::vector<Observation> observations, const KernelParams& params);

double kernel_between(Location a, Location b, const KernelParams& params);

// Batched triangular solve, OpenMP-parallel over query blocks.
std::vector<Prediction> predict(const GpModel& model, std::span<const Location> query);

// One query at a time; reference for predict().
std::vector<Prediction> predict_serial(const GpModel& model, std::span<const Location> query);

VarianceMap variance_map(const GpModel& model, const LocationSet& candidates);

// Posterior mean at every cell, row-major.
std::vector<double> posterior_grid(const GpModel& model, const GridSpec& grid);

}  // namespace ipp

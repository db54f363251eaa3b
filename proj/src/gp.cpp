#include "ipp/gp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "ipp/errors.hpp"

namespace ipp {

namespace {

constexpr double kMaxJitter = 1e-2;
constexpr long kQueryBlock = 64;

double euclidean(Location a, Location b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

void KernelParams::validate() const {
    if (!(length_scale > 0.0)) throw ParameterError("length_scale must be > 0");
    if (!(signal_variance > 0.0)) throw ParameterError("signal_variance must be > 0");
    if (!(jitter >= 0.0)) throw ParameterError("jitter must be >= 0");
}

double matern32(double r, const KernelParams& params) {
    if (!(r >= 0.0)) throw ParameterError("kernel distance must be >= 0");
    const double s = std::sqrt(3.0) * r / params.length_scale;
    return params.signal_variance * (1.0 + s) * std::exp(-s);
}

double kernel_between(Location a, Location b, const KernelParams& params) {
    return matern32(euclidean(a, b), params);
}

GpModel::GpModel(KernelParams params) : params_(params), jitter_(params.jitter) { params_.validate(); }

GpModel fit(std::vector<Observation> observations, const KernelParams& params) {
    GpModel model(params);
    std::unordered_set<Location, LocationHash> seen;
    for (const auto& obs : observations) {
        if (!seen.insert(obs.loc).second) {
            throw ParameterError("duplicate observation at (" + std::to_string(obs.loc.x) + "," +
                                 std::to_string(obs.loc.y) + ")");
        }
        if (!std::isfinite(obs.value)) throw ParameterError("observation value must be finite");
    }
    model.observations_ = std::move(observations);
    const auto n = static_cast<Eigen::Index>(model.observations_.size());
    if (n == 0) return model;

    Eigen::MatrixXd k(n, n);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = model.observations_[i].value;
        for (Eigen::Index j = 0; j <= i; ++j) {
            k(i, j) = k(j, i) = kernel_between(model.observations_[i].loc, model.observations_[j].loc, params);
        }
    }

    double jitter = params.jitter;
    for (;;) {
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(kj);
        if (llt.info() == Eigen::Success) {
            model.chol_ = llt.matrixL();
            model.alpha_ = llt.solve(y);
            model.jitter_ = jitter;
            return model;
        }
        jitter = jitter > 0.0 ? jitter * 10.0 : 1e-8;
        if (jitter > kMaxJitter * (1.0 + 1e-9)) {
            throw NumericalError("Cholesky factorization failed with jitter up to 1e-2 on " + std::to_string(n) +
                                 " observations");
        }
    }
}

std::vector<Prediction> predict(const GpModel& model, std::span<const Location> query) {
    const auto& params = model.params();
    std::vector<Prediction> out(query.size(), Prediction{0.0, params.signal_variance});
    const auto& obs = model.observations();
    const auto n = static_cast<Eigen::Index>(obs.size());
    if (n == 0 || query.empty()) return out;

    const auto q = static_cast<long>(query.size());
    const auto lower = model.cholesky().triangularView<Eigen::Lower>();

#pragma omp parallel for schedule(static)
    for (long start = 0; start < q; start += kQueryBlock) {
        const long cols = std::min(kQueryBlock, q - start);
        Eigen::MatrixXd kstar(n, cols);
        for (long c = 0; c < cols; ++c) {
            for (Eigen::Index i = 0; i < n; ++i) kstar(i, c) = kernel_between(obs[i].loc, query[start + c], params);
        }
        Eigen::VectorXd means = kstar.transpose() * model.weights();
        lower.solveInPlace(kstar);
        Eigen::VectorXd reduction = kstar.colwise().squaredNorm().transpose();
        for (long c = 0; c < cols; ++c) {
            out[start + c] = {means(c), std::max(0.0, params.signal_variance - reduction(c))};
        }
    }
    return out;
}

std::vector<Prediction> predict_serial(const GpModel& model, std::span<const Location> query) {
    const auto& params = model.params();
    std::vector<Prediction> out;
    out.reserve(query.size());
    const auto& obs = model.observations();
    const auto n = static_cast<Eigen::Index>(obs.size());
    Eigen::VectorXd kstar(n);
    for (auto loc : query) {
        if (n == 0) {
            out.push_back({0.0, params.signal_variance});
            continue;
        }
        for (Eigen::Index i = 0; i < n; ++i) kstar(i) = kernel_between(obs[i].loc, loc, params);
        const double mean = kstar.dot(model.weights());
        Eigen::VectorXd v = model.cholesky().triangularView<Eigen::Lower>().solve(kstar);
        out.push_back({mean, std::max(0.0, params.signal_variance - v.squaredNorm())});
    }
    return out;
}

VarianceMap variance_map(const GpModel& model, const LocationSet& candidates) {
    VarianceMap out;
    if (candidates.empty()) return out;
    auto preds = predict(model, candidates.items());
    out.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) out.emplace(candidates[i], preds[i].variance);
    return out;
}

std::vector<double> posterior_grid(const GpModel& model, const GridSpec& grid) {
    const auto cells = grid.cells();
    auto preds = predict(model, cells);
    std::vector<double> out(preds.size());
    std::transform(preds.begin(), preds.end(), out.begin(), [](const Prediction& p) { return p.mean; });
    return out;
}

}  // namespace ipp

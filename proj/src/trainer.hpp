#ifndef SMOOTHNET_TRAINER_HPP
#define SMOOTHNET_TRAINER_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "synth.hpp"

namespace smoothnet {

// Hyperparameters for the full-batch descent loop. The output-bias switch
// exists for ablations; by default nets carry only unit terms.
struct TrainConfig {
    int theta = 10;
    double lr = 0.05;
    int steps = 5000;
    unsigned long long seed = 0;
    double init_lo = -1.0;
    double init_hi = 1.0;
    ActivationKind kind = ActivationKind::logistic();
    bool train_output_bias = false;
};

struct Dataset {
    std::vector<std::vector<double>> inputs; // points in [0,1]^n
    std::vector<double> targets;
    // Scale the targets were divided by, when normalize_targets was applied.
    std::optional<double> normalization;

    int dim() const;
    std::size_t size() const { return inputs.size(); }
};

// Shape and range checks; throw std::invalid_argument on violation.
// lr = 0 is admitted as the degenerate no-op configuration.
void validate(const TrainConfig& cfg);
void validate(const Dataset& data);

// Tabulates f on the uniform grid {0, step, 2 step, ..., 1}.
Dataset tabulate(const std::function<double(double)>& f, double step);
// Two-dimensional tensor grid with the same step on both axes.
Dataset tabulate2(const std::function<double(double, double)>& f, double step);

// Divides targets by max |y| so the largest magnitude becomes one, and
// records the scale. All-zero targets are left alone.
void normalize_targets(Dataset& data);
void denormalize_targets(Dataset& data);

TwoLayerNet init_net(const TrainConfig& cfg, int n);

// Root of the summed squared residuals (the reported eps).
double loss(const TwoLayerNet& net, const Dataset& data);

// The quantity the descent actually minimizes: the mean squared residual.
// Minimizing it is monotone-equivalent to minimizing eps; the mean keeps the
// documented learning rate stable independent of the sample count.
double objective(const TwoLayerNet& net, const Dataset& data);

// Flat parameter order: per unit w[0..n-1], b, lambda; the output bias last
// when enabled. loss_gradient differentiates `objective` in the same layout.
std::vector<double> pack_parameters(const TwoLayerNet& net, bool with_output_bias);
void unpack_parameters(TwoLayerNet& net, const std::vector<double>& p, bool with_output_bias);
std::vector<double> loss_gradient(const TwoLayerNet& net, const Dataset& data,
                                  bool with_output_bias);

struct TrainResult {
    TwoLayerNet net;
    // eps before the first step and after every completed step.
    std::vector<double> trace;
    bool diverged = false;
};

// Full-batch gradient descent for cfg.steps steps. A non-finite loss aborts
// the loop; the partial trace is kept and the divergence flagged.
TrainResult train(const TwoLayerNet& net, const Dataset& data, const TrainConfig& cfg);

// header x1,...,xn,y; one sample per row
void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

// header step,eps
void write_trace_csv(const std::string& path, const std::vector<double>& trace);

} // namespace smoothnet

#endif

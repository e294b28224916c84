#pragma once

#include <array>
#include <span>
#include <vector>

#include "bidcurve/types.hpp"

namespace bidcurve::curvefit {

// h(x) and h'(x) for the constrained logistic model, single point.
double sigmoid_value(const SigmoidParams& sp, double x);
double sigmoid_slope(const SigmoidParams& sp, double x);

// Evaluate a parametric model kind at one cost. Throws InvalidParams for the
// non-parametric kinds or a wrong parameter count.
double eval_model(ModelKind kind, std::span<const double> params, double x);

// Analytic dy/dx of a parametric model kind.
double eval_derivative(ModelKind kind, std::span<const double> params, double x);

// Analytic Jacobian of the sigmoid: one row per cost, columns are the
// partials with respect to scale, steepness, shift.
std::vector<std::array<double, 3>> jacobian(const SigmoidParams& sp,
                                            std::span<const double> xs);

// Fit one model to a click-cost curve. Parametric kinds run damped
// Gauss-Newton from a data-driven start; NearestNeighbor and LinearInterp
// just retain the points. Throws TooFewPoints and DegenerateData per kind.
FitResult fit(ModelKind kind, const ClickCostCurve& curve, const FitConfig& cfg = {});

// Prediction from stored points for the non-parametric kinds. NNS returns
// the nearest point's clicks (ties to the lower cost); LinearInterp
// interpolates and refuses to extrapolate (OutOfRange).
double predict_baseline(ModelKind kind, std::span<const ClickCostPoint> data, double x);

// Clicks predicted at a cost by any fit result, parametric or not.
double predict(const FitResult& fit, double x);

// Spend predicted at a cost: clicks * cost / (1000 * ctr), with the
// non-parametric kinds carrying their stored spend values instead.
Money predict_spend(const FitResult& fit, double x, double ctr);

}  // namespace bidcurve::curvefit

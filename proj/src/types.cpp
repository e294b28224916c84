#include "bidcurve/types.hpp"

#include "bidcurve/errors.hpp"

namespace bidcurve {

const char* model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Sigmoid: return "sigmoid";
        case ModelKind::Power: return "power";
        case ModelKind::MichaelisMenten: return "mm";
        case ModelKind::NegExp: return "negexp";
        case ModelKind::NearestNeighbor: return "nns";
        case ModelKind::LinearInterp: return "li";
    }
    return "?";
}

std::optional<ModelKind> model_from_name(const std::string& name) {
    if (name == "sigmoid") return ModelKind::Sigmoid;
    if (name == "power") return ModelKind::Power;
    if (name == "mm") return ModelKind::MichaelisMenten;
    if (name == "negexp") return ModelKind::NegExp;
    if (name == "nns") return ModelKind::NearestNeighbor;
    if (name == "li") return ModelKind::LinearInterp;
    return std::nullopt;
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::NoOpt: return "no-opt";
        case Strategy::MaxClick: return "mc";
        case Strategy::MaxClick90: return "mc90";
        case Strategy::Inflection: return "ip";
        case Strategy::Inflection90: return "ip90";
    }
    return "?";
}

std::optional<Strategy> strategy_from_name(const std::string& name) {
    if (name == "no-opt") return Strategy::NoOpt;
    if (name == "mc") return Strategy::MaxClick;
    if (name == "mc90") return Strategy::MaxClick90;
    if (name == "ip") return Strategy::Inflection;
    if (name == "ip90") return Strategy::Inflection90;
    return std::nullopt;
}

SigmoidParams FitResult::sigmoid() const {
    if (kind != ModelKind::Sigmoid || params.size() != 3) {
        throw InvalidParams("fit result does not hold sigmoid parameters");
    }
    return SigmoidParams{params[0], params[1], params[2]};
}

}  // namespace bidcurve

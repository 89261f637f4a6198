#include <cmath>
#include <numbers>
#include <set>

#include "json_support.hpp"
#include "kerrkit/error.hpp"
#include "kerrkit/kernels.hpp"

namespace kerrkit {

namespace {

struct FamilyName {
  KernelFamily family;
  const char* name;
};

constexpr FamilyName kFamilies[] = {
    {KernelFamily::KerrPhasePos, "KerrPhasePos"}, {KernelFamily::KerrPhaseNeg, "KerrPhaseNeg"},
    {KernelFamily::KerrAmpPos, "KerrAmpPos"},     {KernelFamily::KerrAmpNeg, "KerrAmpNeg"},
    {KernelFamily::SqueezedPhase, "SqueezedPhase"}, {KernelFamily::SqueezedAmp, "SqueezedAmp"},
    {KernelFamily::RBF, "RBF"},                   {KernelFamily::ESS, "ESS"},
    {KernelFamily::QEC, "QEC"},
};

std::string family_label(const KernelSpec& s) { return to_string(s.family); }

void need(bool cond, const KernelSpec& s, const std::string& msg) {
  if (!cond) throw DomainError(family_label(s) + ": " + msg);
}

void require_positive_param(const std::optional<double>& v, const KernelSpec& s, const char* name) {
  need(v.has_value(), s, std::string("missing parameter '") + name + "'");
  need(std::isfinite(*v) && *v > 0.0, s, std::string("parameter '") + name + "' must be > 0");
}

void require_lambda(const KernelSpec& s, bool positive) {
  need(s.params.lambda.has_value(), s, "missing parameter 'lambda'");
  need(std::isfinite(*s.params.lambda) && *s.params.lambda != 0.0, s, "lambda must be nonzero");
  need((*s.params.lambda > 0.0) == positive, s,
       positive ? "family requires lambda > 0" : "family requires lambda < 0");
  need(s.params.j.has_value(), s, "missing parameter 'j'");
}

}  // namespace

std::string to_string(KernelFamily f) {
  for (const auto& e : kFamilies)
    if (e.family == f) return e.name;
  return "unknown";
}

std::string to_string(Realify r) {
  return r == Realify::SquaredModulus ? "SquaredModulus" : "RealPart";
}

std::string to_string(Compose c) { return c == Compose::Product ? "Product" : "SumThenRealify"; }

KernelFamily parse_family(const std::string& s) {
  for (const auto& e : kFamilies)
    if (s == e.name) return e.family;
  throw ParseError("unknown kernel family '" + s + "'");
}

Realify parse_realify(const std::string& s) {
  if (s == "SquaredModulus") return Realify::SquaredModulus;
  if (s == "RealPart") return Realify::RealPart;
  throw ParseError("unknown realify policy '" + s + "'");
}

Compose parse_compose(const std::string& s) {
  if (s == "Product") return Compose::Product;
  if (s == "SumThenRealify") return Compose::SumThenRealify;
  throw ParseError("unknown compose rule '" + s + "'");
}

bool is_complex_family(KernelFamily f) {
  return f == KernelFamily::KerrPhasePos || f == KernelFamily::KerrPhaseNeg ||
         f == KernelFamily::SqueezedPhase;
}

bool is_phase_family(KernelFamily f) { return is_complex_family(f); }

void validate(const KernelSpec& s) {
  switch (s.family) {
    case KernelFamily::KerrPhasePos:
      require_lambda(s, true);
      require_positive_param(s.params.c, s, "c");
      break;
    case KernelFamily::KerrPhaseNeg: {
      require_lambda(s, false);
      require_positive_param(s.params.c, s, "c");
      const double u = std::sqrt(std::abs(*s.params.lambda) / 2.0) * *s.params.c;
      need(u < std::numbers::pi / 2.0, s, "sqrt(|lambda|/2) c must be < pi/2");
      break;
    }
    case KernelFamily::KerrAmpPos: require_lambda(s, true); break;
    case KernelFamily::KerrAmpNeg: require_lambda(s, false); break;
    case KernelFamily::SqueezedPhase: require_positive_param(s.params.c, s, "c"); break;
    case KernelFamily::SqueezedAmp: break;
    case KernelFamily::RBF: require_positive_param(s.params.sigma, s, "sigma"); break;
    case KernelFamily::ESS:
      require_positive_param(s.params.l, s, "l");
      require_positive_param(s.params.p, s, "p");
      break;
    case KernelFamily::QEC:
      require_lambda(s, false);
      require_positive_param(s.params.l, s, "l");
      break;
  }
}

KernelSpec kerr_phase_spec(double c, double lambda, double j) {
  KernelSpec s;
  s.family = lambda > 0.0 ? KernelFamily::KerrPhasePos : KernelFamily::KerrPhaseNeg;
  s.params.c = c;
  s.params.lambda = lambda;
  s.params.j = HalfInteger::from_double(j);
  validate(s);
  return s;
}

KernelSpec kerr_amp_spec(double lambda, double j) {
  KernelSpec s;
  s.family = lambda > 0.0 ? KernelFamily::KerrAmpPos : KernelFamily::KerrAmpNeg;
  s.params.lambda = lambda;
  s.params.j = HalfInteger::from_double(j);
  validate(s);
  return s;
}

KernelSpec squeezed_phase_spec(double c) {
  KernelSpec s;
  s.family = KernelFamily::SqueezedPhase;
  s.params.c = c;
  validate(s);
  return s;
}

KernelSpec squeezed_amp_spec() {
  KernelSpec s;
  s.family = KernelFamily::SqueezedAmp;
  return s;
}

KernelSpec rbf_spec(double sigma) {
  KernelSpec s;
  s.family = KernelFamily::RBF;
  s.params.sigma = sigma;
  validate(s);
  return s;
}

KernelSpec ess_spec(double l, double p) {
  KernelSpec s;
  s.family = KernelFamily::ESS;
  s.params.l = l;
  s.params.p = p;
  validate(s);
  return s;
}

KernelSpec qec_spec(double l, double lambda, double j) {
  KernelSpec s;
  s.family = KernelFamily::QEC;
  s.params.l = l;
  s.params.lambda = lambda;
  s.params.j = HalfInteger::from_double(j);
  validate(s);
  return s;
}

namespace detail {

nlohmann::json spec_to_json(const KernelSpec& spec) {
  nlohmann::json params = nlohmann::json::object();
  const auto& p = spec.params;
  if (p.c) params["c"] = *p.c;
  if (p.lambda) params["lambda"] = *p.lambda;
  if (p.j) params["j"] = p.j->value();
  if (p.sigma) params["sigma"] = *p.sigma;
  if (p.l) params["l"] = *p.l;
  if (p.p) params["p"] = *p.p;
  if (spec.family == KernelFamily::QEC) {
    params["normalize_diagonal"] = p.normalize_diagonal;
    params["form"] = p.qec_form == QecForm::Printed ? "printed" : "complement";
  }
  return {{"family", to_string(spec.family)},
          {"params", params},
          {"realify", to_string(spec.realify)},
          {"compose", to_string(spec.compose)}};
}

namespace {

double number_field(const nlohmann::json& params, const char* name) {
  const auto& v = params.at(name);
  if (!v.is_number()) throw ParseError(std::string("field 'params.") + name + "' must be a number");
  return v.get<double>();
}

}  // namespace

KernelSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("kernel spec must be a JSON object");
  static const std::set<std::string> top = {"family", "params", "realify", "compose"};
  for (const auto& [key, _] : j.items()) {
    if (!top.count(key)) throw ParseError("unknown field '" + key + "' in kernel spec");
  }
  if (!j.contains("family") || !j["family"].is_string()) {
    throw ParseError("field 'family' missing or not a string");
  }
  KernelSpec spec;
  spec.family = parse_family(j["family"].get<std::string>());
  if (j.contains("realify")) {
    if (!j["realify"].is_string()) throw ParseError("field 'realify' must be a string");
    spec.realify = parse_realify(j["realify"].get<std::string>());
  }
  if (j.contains("compose")) {
    if (!j["compose"].is_string()) throw ParseError("field 'compose' must be a string");
    spec.compose = parse_compose(j["compose"].get<std::string>());
  }
  if (j.contains("params")) {
    const auto& params = j["params"];
    if (!params.is_object()) throw ParseError("field 'params' must be an object");
    auto& p = spec.params;
    for (const auto& [key, value] : params.items()) {
      if (key == "c") p.c = number_field(params, "c");
      else if (key == "lambda") p.lambda = number_field(params, "lambda");
      else if (key == "sigma") p.sigma = number_field(params, "sigma");
      else if (key == "l") p.l = number_field(params, "l");
      else if (key == "p") p.p = number_field(params, "p");
      else if (key == "j") {
        const double jv = number_field(params, "j");
        try {
          p.j = HalfInteger::from_double(jv);
        } catch (const DomainError&) {
          throw ParseError("field 'params.j' must be a positive half-integer");
        }
      } else if (key == "normalize_diagonal") {
        if (!value.is_boolean()) throw ParseError("field 'params.normalize_diagonal' must be a boolean");
        p.normalize_diagonal = value.get<bool>();
      } else if (key == "form") {
        const std::string f = value.is_string() ? value.get<std::string>() : "";
        if (f == "printed") p.qec_form = QecForm::Printed;
        else if (f == "complement") p.qec_form = QecForm::Complement;
        else throw ParseError("field 'params.form' must be \"printed\" or \"complement\"");
      } else {
        throw ParseError("unknown field 'params." + key + "'");
      }
    }
  }
  try {
    validate(spec);
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid kernel spec: ") + e.what());
  }
  return spec;
}

}  // namespace detail

std::string to_json(const KernelSpec& spec) { return detail::spec_to_json(spec).dump(); }

KernelSpec kernel_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("kernel spec is not valid JSON: ") + e.what(), e.byte);
  }
  return detail::spec_from_json(j);
}

}  // namespace kerrkit

#include "classthresh/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "classthresh/errors.hpp"

namespace classthresh {

double round6(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

std::string fmt6(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Json j6(double v) {
  if (std::isnan(v)) return Json();
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return round6(v);
}

Json j6(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(j6(x));
  return a;
}

namespace {

Json j6opt(const std::optional<double>& v) {
  return v.has_value() ? j6(*v) : Json();
}

}  // namespace

Json to_json(const EstimatedRule& rule) {
  Json j;
  j["classes"] = rule.dist.labels;
  j["counts"] = rule.dist.counts;
  j["p_hat"] = j6(rule.dist.probs);
  j["mode"] = rule.model.mode == StandardizationMode::kMarginal
                  ? "marginal"
                  : "conditional";
  j["tau"] = j6(rule.model.tau);
  j["mu"] = j6(rule.model.mu);
  j["sigma"] = j6(rule.model.sigma);
  j["alpha"] = j6(rule.standardized.alpha);
  j["c"] = j6(rule.standardized.c);
  j["raw_thresholds"] = j6(rule.raw);
  j["rule"] = rule.name;
  j["g"] = rule.g.has_value() ? j6(rule.g->g) : Json();
  if (rule.optimal.has_value()) {
    Json o;
    o["c_star"] = j6(rule.optimal->c_star);
    o["cap"] = j6(rule.optimal->cap);
    o["objective"] = j6(rule.optimal->objective);
    o["minority_class"] = rule.dist.labels[rule.optimal->minority];
    j["optimal"] = o;
  }
  return j;
}

Json to_json(const BootstrapReport& report) {
  Json j;
  j["B"] = report.B;
  j["seed"] = report.seed;
  j["ci_level"] = j6(report.ci_level);
  j["mean"] = j6(report.mean);
  j["se"] = j6(report.se);
  j["ci_lo"] = j6(report.ci_lo);
  j["ci_hi"] = j6(report.ci_hi);
  j["rejected"] = report.rejected;
  if (!report.replicates.empty()) {
    Json reps = Json::array();
    for (const auto& row : report.replicates) reps.push_back(j6(row));
    j["replicates"] = reps;
  }
  return j;
}

Json to_json(const ScreeningSimReport& report) {
  Json j;
  j["N"] = report.N;
  j["B"] = report.B;
  j["bw_factor"] = j6(report.bw_factor);
  j["seed"] = report.seed;
  j["class_rates"] = j6(report.class_rates);
  j["marginal_rate"] = j6(report.marginal_rate);
  j["noise_sd"] = j6(report.noise_sd);
  j["rejected"] = report.rejected;
  return j;
}

Json to_json(const EvaluationReport& report) {
  Json j;
  j["classes"] = report.labels;
  j["n_k"] = report.n_k;
  j["alarms_k"] = report.alarms_k;
  j["alarm_rate_k"] = j6(report.alarm_rate_k);
  j["n"] = report.n;
  j["alarms"] = report.alarms;
  j["alarm_rate"] = j6(report.alarm_rate);
  j["has_outcomes"] = report.has_outcomes;
  if (report.has_outcomes) {
    Json cells = Json::array();
    for (const auto& c : report.cells) {
      Json cell;
      cell["tp"] = c.tp;
      cell["fn"] = c.fn;
      cell["fp"] = c.fp;
      cell["tn"] = c.tn;
      cells.push_back(cell);
    }
    j["cells"] = cells;
    Json tpr = Json::array(), tnr = Json::array();
    for (std::size_t k = 0; k < report.labels.size(); ++k) {
      tpr.push_back(j6opt(report.tpr_k[k]));
      tnr.push_back(j6opt(report.tnr_k[k]));
    }
    j["tpr_k"] = tpr;
    j["tnr_k"] = tnr;
    j["pooled_tpr"] = j6opt(report.pooled_tpr);
    j["pooled_tnr"] = j6opt(report.pooled_tnr);
    j["overall_tpr"] = j6opt(report.overall_tpr);
    j["overall_tnr"] = j6opt(report.overall_tnr);
  }
  return j;
}

namespace {

Json to_json(const EnvelopeCheck& check) {
  Json j;
  j["c_star"] = j6(check.c_star);
  j["cap"] = j6(check.cap);
  Json ok = Json::array();
  for (bool b : check.ok) ok.push_back(b);
  j["ok"] = ok;
  j["all_ok"] = check.all_ok;
  return j;
}

}  // namespace

Json to_json(const Theorem1Report& report) {
  Json j;
  j["alpha"] = j6(report.alpha);
  j["false_alarm"] = j6(report.false_alarm);
  j["level_ok"] = report.level_ok;
  j["c"] = j6(report.c);
  j["g"] = j6(report.g);
  if (report.shared.has_value()) j["shared_budget"] = to_json(*report.shared);
  if (report.per_class.has_value()) {
    j["per_class_budget"] = to_json(*report.per_class);
  }
  j["budget_sum"] = j6opt(report.budget_sum);
  if (report.budget_ok.has_value()) j["budget_ok"] = *report.budget_ok;
  j["power_floor"] = j6opt(report.power_floor);
  j["all_ok"] = report.all_ok;
  return j;
}

Json to_json(const PowerReport& report) {
  Json j;
  j["conditional"] = j6(report.conditional);
  j["marginal"] = j6(report.marginal);
  return j;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string to_csv(const EstimatedRule& rule) {
  std::ostringstream out;
  out << "class,count,p_hat,mu,sigma,c,raw_threshold,g\n";
  for (std::size_t k = 0; k < rule.dist.size(); ++k) {
    const auto ki = static_cast<std::uint32_t>(k);
    out << csv_escape(rule.dist.labels[k]) << ','
        << (rule.dist.counts.empty() ? 0 : rule.dist.counts[k]) << ','
        << fmt6(rule.dist.probs[k]) << ',' << fmt6(rule.model.mu_for(ki)) << ','
        << fmt6(rule.model.sigma_for(ki)) << ','
        << fmt6(rule.standardized.c[k]) << ',' << fmt6(rule.raw[k]) << ',';
    if (rule.g.has_value()) out << fmt6(rule.g->g[k]);
    out << '\n';
  }
  return out.str();
}

std::string to_csv(const BootstrapReport& report,
                   const std::vector<std::string>& labels) {
  std::ostringstream out;
  out << "class,mean,se,ci_lo,ci_hi\n";
  for (std::size_t k = 0; k < labels.size(); ++k) {
    out << csv_escape(labels[k]) << ',' << fmt6(report.mean[k]) << ','
        << fmt6(report.se[k]) << ',' << fmt6(report.ci_lo[k]) << ','
        << fmt6(report.ci_hi[k]) << '\n';
  }
  return out.str();
}

std::string to_csv(const ScreeningSimReport& report,
                   const std::vector<std::string>& labels) {
  std::ostringstream out;
  out << "class,alarm_rate,noise_sd\n";
  for (std::size_t k = 0; k < labels.size(); ++k) {
    out << csv_escape(labels[k]) << ',' << fmt6(report.class_rates[k]) << ','
        << fmt6(report.noise_sd[k]) << '\n';
  }
  out << "(marginal)," << fmt6(report.marginal_rate) << ",\n";
  return out.str();
}

std::string to_csv(const EvaluationReport& report) {
  std::ostringstream out;
  const bool y = report.has_outcomes;
  out << "class,n,alarms,alarm_rate";
  if (y) out << ",tp,fn,fp,tn,tpr,tnr";
  out << '\n';
  auto opt6 = [](const std::optional<double>& v) {
    return v.has_value() ? fmt6(*v) : std::string();
  };
  for (std::size_t k = 0; k < report.labels.size(); ++k) {
    out << csv_escape(report.labels[k]) << ',' << report.n_k[k] << ','
        << report.alarms_k[k] << ',' << fmt6(report.alarm_rate_k[k]);
    if (y) {
      const auto& c = report.cells[k];
      out << ',' << c.tp << ',' << c.fn << ',' << c.fp << ',' << c.tn << ','
          << opt6(report.tpr_k[k]) << ',' << opt6(report.tnr_k[k]);
    }
    out << '\n';
  }
  out << "(overall)," << report.n << ',' << report.alarms << ','
      << fmt6(report.alarm_rate);
  if (y) {
    out << ",,,,," << opt6(report.overall_tpr) << ','
        << opt6(report.overall_tnr);
  }
  out << '\n';
  return out.str();
}

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError("report validation: " + what);
}

bool is_rate(const Json& v) {
  return v.is_number() && v.get<double>() >= 0.0 && v.get<double>() <= 1.0;
}

void validate_rule_json(const Json& j) {
  require(j.contains("classes") && j["classes"].is_array(), "classes missing");
  const std::size_t K = j["classes"].size();
  require(j["p_hat"].size() == K, "p_hat size");
  double total = 0.0;
  for (const auto& p : j["p_hat"]) {
    require(is_rate(p), "p_hat range");
    total += p.get<double>();
  }
  require(std::fabs(total - 1.0) < 1e-6, "p_hat sum");
  require(j["c"].size() == K, "c size");
  require(j["raw_thresholds"].size() == K, "raw size");
  for (const auto& s : j["sigma"]) {
    require(s.is_number() && s.get<double>() > 0.0, "sigma positive");
  }
  if (!j["g"].is_null()) {
    require(j["g"].size() == K, "g size");
    for (std::size_t k = 0; k < K; ++k) {
      const auto& gk = j["g"][k];
      require(gk.is_number() && gk.get<double>() >= 0.0, "g nonnegative");
      require(gk.get<double>() <= j["p_hat"][k].get<double>() + 1e-9,
              "g below p_hat");
    }
  }
}

void validate_bootstrap_json(const Json& j) {
  const std::size_t K = j["mean"].size();
  require(j["se"].size() == K && j["ci_lo"].size() == K &&
              j["ci_hi"].size() == K,
          "bootstrap vector sizes");
  for (std::size_t k = 0; k < K; ++k) {
    require(j["se"][k].get<double>() >= 0.0, "se nonnegative");
    require(j["ci_lo"][k].get<double>() <= j["ci_hi"][k].get<double>() + 1e-12,
            "interval ordering");
  }
}

void validate_sim_json(const Json& j) {
  for (const auto& r : j["class_rates"]) require(is_rate(r), "class rate");
  require(is_rate(j["marginal_rate"]), "marginal rate");
  for (const auto& s : j["noise_sd"]) {
    require(s.get<double>() >= 0.0, "noise sd");
  }
}

void validate_eval_json(const Json& j) {
  const std::size_t K = j["classes"].size();
  std::int64_t total_n = 0, total_alarms = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const std::int64_t nk = j["n_k"][k].get<std::int64_t>();
    const std::int64_t ak = j["alarms_k"][k].get<std::int64_t>();
    require(ak >= 0 && ak <= nk, "alarm counts");
    require(is_rate(j["alarm_rate_k"][k]), "alarm rate");
    total_n += nk;
    total_alarms += ak;
    if (j["has_outcomes"].get<bool>()) {
      const auto& c = j["cells"][k];
      const std::int64_t cells_n = c["tp"].get<std::int64_t>() +
                                   c["fn"].get<std::int64_t>() +
                                   c["fp"].get<std::int64_t>() +
                                   c["tn"].get<std::int64_t>();
      require(cells_n == nk, "cells conserve n_k");
      require(c["tp"].get<std::int64_t>() + c["fp"].get<std::int64_t>() == ak,
              "cells conserve alarms");
    }
  }
  require(total_n == j["n"].get<std::int64_t>(), "n conserved");
  require(total_alarms == j["alarms"].get<std::int64_t>(), "alarms conserved");
}

}  // namespace

void validate_report_json(const Json& report) {
  require(report.contains("schema_version"), "schema_version missing");
  require(report.contains("command"), "command missing");
  require(report.contains("config"), "config missing");
  const std::string cmd = report["command"].get<std::string>();
  const Json& res = report.at("results");
  if (res.contains("rule")) validate_rule_json(res["rule"]);
  if (cmd == "thresholds" && res.contains("rule")) {
    // already validated above
  } else if (cmd == "bootstrap") {
    validate_bootstrap_json(res.at("bootstrap"));
  } else if (cmd == "simulate") {
    validate_sim_json(res.at("simulation"));
  } else if (cmd == "evaluate") {
    validate_eval_json(res.at("evaluation"));
  }
}

}  // namespace classthresh

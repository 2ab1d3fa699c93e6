#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "pmsched/harness.hpp"

namespace pmsched {
namespace {

std::string level_name(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string factor_value(const Observation& o, const std::string& factor) {
  if (factor == "load") return std::to_string(o.load);
  if (factor == "algorithm" || factor == "rule") return o.algorithm;
  if (factor == "nRoutings") return std::to_string(o.routings);
  if (factor == "setupRatio") return level_name(o.setup_ratio);
  if (factor == "flexMean") return level_name(o.flex_mean);
  throw std::invalid_argument("unknown factor '" + factor + "'");
}

bool numeric(const std::string& s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

double f_statistic(double ss, double df, double ss_res, double df_res) {
  if (df <= 0 || ss <= 0) return 0.0;
  if (ss_res <= 0) return std::numeric_limits<double>::infinity();
  return (ss / df) / (ss_res / df_res);
}

}  // namespace

FactorialData factorial_data(const std::vector<Observation>& rows, const std::vector<std::string>& factors) {
  FactorialData data;
  data.factors = factors;
  data.levels.resize(factors.size());
  std::vector<const Observation*> kept;
  for (const Observation& o : rows) {
    if (o.tardiness) kept.push_back(&o);
  }
  for (std::size_t f = 0; f < factors.size(); ++f) {
    auto& levels = data.levels[f];
    for (const Observation* o : kept) {
      std::string v = factor_value(*o, factors[f]);
      if (std::find(levels.begin(), levels.end(), v) == levels.end()) levels.push_back(std::move(v));
    }
    bool all_numeric = true;
    double tmp = 0;
    for (const auto& l : levels) all_numeric = all_numeric && numeric(l, tmp);
    if (all_numeric) {
      std::sort(levels.begin(), levels.end(), [](const std::string& a, const std::string& b) {
        double x = 0, y = 0;
        numeric(a, x);
        numeric(b, y);
        return x < y;
      });
    }
  }
  for (const Observation* o : kept) {
    std::vector<std::size_t> idx;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const auto& levels = data.levels[f];
      idx.push_back(static_cast<std::size_t>(
          std::find(levels.begin(), levels.end(), factor_value(*o, factors[f])) - levels.begin()));
    }
    data.rows.push_back(std::move(idx));
    data.response.push_back(o->log_tardiness);
  }
  return data;
}

double f_critical(double df1, double df2, double alpha) {
  if (!(df1 > 0) || !(df2 > 0)) return std::numeric_limits<double>::quiet_NaN();
  boost::math::fisher_f dist(df1, df2);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

double effect_to_ratio(double effect) { return std::pow(10.0, effect) - 1.0; }

EffectReport anova_effects(const FactorialData& data, double alpha) {
  const std::size_t k = data.factors.size();
  const std::size_t n = data.response.size();
  if (k == 0) throw DesignError("no factor given");
  if (n == 0) throw DesignError("no observation");
  if (data.rows.size() != n || data.levels.size() != k) throw DesignError("malformed factorial data");

  std::size_t cells = 1;
  for (const auto& levels : data.levels) {
    if (levels.empty()) throw DesignError("factor without levels");
    cells *= levels.size();
  }
  std::vector<std::size_t> cell_count(cells, 0);
  for (const auto& row : data.rows) {
    if (row.size() != k) throw DesignError("row with a wrong number of factor levels");
    std::size_t cell = 0;
    for (std::size_t f = 0; f < k; ++f) {
      if (row[f] >= data.levels[f].size()) throw DesignError("level index out of range");
      cell = cell * data.levels[f].size() + row[f];
    }
    ++cell_count[cell];
  }
  const std::size_t reps = cell_count.front();
  for (std::size_t c = 0; c < cells; ++c) {
    if (cell_count[c] != reps || reps == 0) {
      throw DesignError("unbalanced design: a factor-level cell has " + std::to_string(cell_count[c]) +
                        " observations, another has " + std::to_string(reps) +
                        "; subset the data to a complete balanced design");
    }
  }

  EffectReport report;
  report.observations = n;
  report.replicates = reps;
  double mean = 0;
  for (double y : data.response) mean += y;
  mean /= static_cast<double>(n);
  report.grand_mean = mean;
  double ss_total = 0;
  for (double y : data.response) ss_total += (y - mean) * (y - mean);
  // identical responses up to rounding: nothing to decompose
  const bool flat = ss_total <= 1e-26 * static_cast<double>(n) * (1.0 + mean * mean);

  std::vector<std::vector<double>> level_mean(k);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t levels = data.levels[f].size();
    std::vector<double> sum(levels, 0.0);
    std::vector<double> count(levels, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      sum[data.rows[r][f]] += data.response[r];
      count[data.rows[r][f]] += 1;
    }
    FactorEffect fe;
    fe.name = data.factors[f];
    fe.levels = data.levels[f];
    level_mean[f].resize(levels);
    for (std::size_t l = 0; l < levels; ++l) {
      level_mean[f][l] = sum[l] / count[l];
      const double e = flat ? 0.0 : level_mean[f][l] - mean;
      fe.effects.push_back(e);
      fe.max_abs_effect = std::max(fe.max_abs_effect, std::abs(e));
      fe.sum_squares += count[l] * e * e;
    }
    fe.df = static_cast<double>(levels - 1);
    report.factors.push_back(std::move(fe));
  }

  for (std::size_t f = 0; f < k; ++f) {
    for (std::size_t g = f + 1; g < k; ++g) {
      const std::size_t lf = data.levels[f].size();
      const std::size_t lg = data.levels[g].size();
      std::vector<double> sum(lf * lg, 0.0);
      std::vector<double> count(lf * lg, 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        const std::size_t c = data.rows[r][f] * lg + data.rows[r][g];
        sum[c] += data.response[r];
        count[c] += 1;
      }
      InteractionEffect ie;
      ie.first = data.factors[f];
      ie.second = data.factors[g];
      ie.table.assign(lf, std::vector<double>(lg, 0.0));
      for (std::size_t a = 0; a < lf; ++a) {
        for (std::size_t b = 0; b < lg; ++b) {
          const double cm = sum[a * lg + b] / count[a * lg + b];
          const double v = flat ? 0.0 : cm - level_mean[f][a] - level_mean[g][b] + mean;
          ie.table[a][b] = v;
          ie.max_abs_interaction = std::max(ie.max_abs_interaction, std::abs(v));
          ie.sum_squares += count[a * lg + b] * v * v;
        }
      }
      ie.df = static_cast<double>((lf - 1) * (lg - 1));
      report.interactions.push_back(std::move(ie));
    }
  }

  double explained = 0;
  double df_used = 0;
  for (const auto& fe : report.factors) {
    explained += fe.sum_squares;
    df_used += fe.df;
  }
  for (const auto& ie : report.interactions) {
    explained += ie.sum_squares;
    df_used += ie.df;
  }
  report.residual_df = static_cast<double>(n) - 1.0 - df_used;
  if (report.residual_df <= 0) {
    throw DesignError("no residual degrees of freedom left; add replicates or drop a factor");
  }
  report.residual_sum_squares = flat ? 0.0 : std::max(0.0, ss_total - explained);

  for (auto& fe : report.factors) {
    fe.f_value = f_statistic(fe.sum_squares, fe.df, report.residual_sum_squares, report.residual_df);
    fe.f_critical = f_critical(fe.df, report.residual_df, alpha);
    fe.significant = fe.df > 0 && fe.f_value > fe.f_critical;
  }
  for (auto& ie : report.interactions) {
    ie.f_value = f_statistic(ie.sum_squares, ie.df, report.residual_sum_squares, report.residual_df);
    ie.f_critical = f_critical(ie.df, report.residual_df, alpha);
    ie.significant = ie.df > 0 && ie.f_value > ie.f_critical;
  }
  return report;
}

void write_report_csv(std::ostream& out, const EffectReport& r) {
  out << "section,factor1,factor2,level1,level2,effect,maxEffect,F,Fcritical,df1,df2,significant\n";
  auto num = [](double v) { return level_name(v); };
  for (const auto& fe : r.factors) {
    out << "factor," << fe.name << ",,,,," << num(fe.max_abs_effect) << ',' << num(fe.f_value) << ','
        << num(fe.f_critical) << ',' << num(fe.df) << ',' << num(r.residual_df) << ','
        << (fe.significant ? "yes" : "no") << '\n';
    for (std::size_t l = 0; l < fe.levels.size(); ++l) {
      out << "level," << fe.name << ",," << fe.levels[l] << ",," << num(fe.effects[l]) << ",,,,,,\n";
    }
  }
  for (const auto& ie : r.interactions) {
    out << "interaction," << ie.first << ',' << ie.second << ",,,," << num(ie.max_abs_interaction) << ','
        << num(ie.f_value) << ',' << num(ie.f_critical) << ',' << num(ie.df) << ',' << num(r.residual_df) << ','
        << (ie.significant ? "yes" : "no") << '\n';
  }
  for (std::size_t k = 0; k < r.interactions.size(); ++k) {
    const auto& ie = r.interactions[k];
    const auto& first = *std::find_if(r.factors.begin(), r.factors.end(), [&](const auto& f) { return f.name == ie.first; });
    const auto& second = *std::find_if(r.factors.begin(), r.factors.end(), [&](const auto& f) { return f.name == ie.second; });
    for (std::size_t a = 0; a < ie.table.size(); ++a) {
      for (std::size_t b = 0; b < ie.table[a].size(); ++b) {
        out << "cell," << ie.first << ',' << ie.second << ',' << first.levels[a] << ',' << second.levels[b] << ','
            << num(ie.table[a][b]) << ",,,,,,\n";
      }
    }
  }
}

std::string format_report(const EffectReport& r) {
  std::ostringstream out;
  out << std::fixed;
  out << "observations " << r.observations << ", replicates per cell " << r.replicates << ", grand mean "
      << std::setprecision(3) << r.grand_mean << ", residual df " << std::setprecision(0) << r.residual_df << "\n\n";

  out << std::left << std::setw(16) << "parameter" << std::right << std::setw(12) << "max effect" << std::setw(14)
      << "exp. Fisher" << std::setw(14) << "theo. Fisher" << std::setw(12) << "dof" << std::setw(13) << "significant"
      << '\n';
  for (const auto& fe : r.factors) {
    std::ostringstream dof;
    dof << fe.df << "," << r.residual_df;
    out << std::left << std::setw(16) << fe.name << std::right << std::setprecision(3) << std::setw(12)
        << fe.max_abs_effect << std::setprecision(2) << std::setw(14) << fe.f_value << std::setw(14) << fe.f_critical
        << std::setw(12) << dof.str() << std::setw(13) << (fe.significant ? "yes" : "no") << '\n';
  }
  out << '\n'
      << std::left << std::setw(16) << "parameter 1" << std::setw(16) << "parameter 2" << std::right << std::setw(12)
      << "max inter." << std::setw(14) << "exp. Fisher" << std::setw(14) << "theo. Fisher" << std::setw(12) << "dof"
      << std::setw(13) << "significant" << '\n';
  for (const auto& ie : r.interactions) {
    std::ostringstream dof;
    dof << std::fixed << std::setprecision(0) << ie.df << "," << r.residual_df;
    out << std::left << std::setw(16) << ie.first << std::setw(16) << ie.second << std::right << std::setprecision(3)
        << std::setw(12) << ie.max_abs_interaction << std::setprecision(2) << std::setw(14) << ie.f_value
        << std::setw(14) << ie.f_critical << std::setw(12) << dof.str() << std::setw(13)
        << (ie.significant ? "yes" : "no") << '\n';
  }
  for (const auto& fe : r.factors) {
    out << "\neffect of " << fe.name << " on the response\n";
    for (std::size_t l = 0; l < fe.levels.size(); ++l) {
      out << "  " << std::left << std::setw(24) << fe.levels[l] << std::right << std::setprecision(3) << std::setw(8)
          << fe.effects[l] << "   (x" << std::setprecision(2) << std::pow(10.0, fe.effects[l]) << ")\n";
    }
  }
  return out.str();
}

}  // namespace pmsched

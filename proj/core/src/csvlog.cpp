#include "bnk/csvlog.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace bnk {

std::string csv_header() {
  return "t,M0,M1x,M1y,M1z,M2,M2pg,entropy,linf,gamma_conc,"
         "drift_mass_weak,drift_energy_weak,drift_mass_strong,drift_energy_strong";
}

void write_timeseries_csv(std::ostream& os, const TimeSeries& series, int digits) {
  if (digits < 6 || digits > 17) {
    throw std::invalid_argument("write_timeseries_csv: digits must lie in [6, 17]");
  }
  if (series.records.size() != series.times.size() ||
      series.drifts.size() != series.times.size()) {
    throw std::invalid_argument(
        "write_timeseries_csv: times/records/drifts lengths disagree");
  }
  os << csv_header() << "\n";
  char buf[40];
  const auto put = [&](double x, char sep) {
    std::snprintf(buf, sizeof buf, "%.*g%c", digits, x, sep);
    os << buf;
  };
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const MomentsRecord& r = series.records[i];
    const DriftRecord& dr = series.drifts[i];
    put(series.times[i], ',');
    put(r.m0, ',');
    put(r.m1[0], ',');
    put(r.m1[1], ',');
    put(r.m1[2], ',');
    put(r.m2, ',');
    put(r.m2_plus_gamma, ',');
    put(r.entropy, ',');
    put(r.linf, ',');
    put(r.gamma_conc, ',');
    put(dr.mass_weak, ',');
    put(dr.energy_weak, ',');
    put(dr.mass_strong, ',');
    put(dr.energy_strong, '\n');
  }
}

void write_timeseries_csv(const std::string& path, const TimeSeries& series,
                          int digits) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open csv for writing: " + path);
  }
  write_timeseries_csv(out, series, digits);
}

}  // namespace bnk

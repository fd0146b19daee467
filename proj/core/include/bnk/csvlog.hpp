#pragma once

#include <iosfwd>
#include <string>

#include "bnk/scheme.hpp"

namespace bnk {

// Fixed column contract of timeseries.csv. Values are printed with `digits`
// significant digits (%.*g); at the default 15 the output is reproducible
// byte-for-byte across reruns on the same platform.
std::string csv_header();

void write_timeseries_csv(std::ostream& os, const TimeSeries& series,
                          int digits = 15);
void write_timeseries_csv(const std::string& path, const TimeSeries& series,
                          int digits = 15);

}  // namespace bnk

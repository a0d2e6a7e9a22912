#ifndef OSCPHASE_CSV_HPP
#define OSCPHASE_CSV_HPP

#include <ostream>
#include <string>
#include <vector>

#include "oscphase/waveform.hpp"

namespace oscphase {

// All numeric output uses 17 significant digits so values round-trip
// exactly through text.
std::string format_double(double v);

// Waveform block: header `theta,v0,...,v{dim-1}`, one row per sample at
// theta = k/num_samples.
void write_waveform_csv(std::ostream& os, const PeriodicWaveform& w,
                        const std::vector<std::string>& column_names = {});
PeriodicWaveform read_waveform_csv(std::istream& is);

// Trajectory block with caller-supplied header names.
void write_trajectory_csv(std::ostream& os, const std::vector<std::string>& header,
                          const std::vector<double>& t, const Eigen::MatrixXd& columns);

} // namespace oscphase

#endif

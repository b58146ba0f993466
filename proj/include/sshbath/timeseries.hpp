// timeseries.hpp — labeled complex time series shared by the dynamics and
// lattice modules.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "sshbath/common.hpp"

namespace sshbath {

struct TimeSeries {
  std::vector<double> times;
  std::map<std::string, std::vector<cplx>> values;

  const std::vector<cplx>& at(const std::string& label) const {
    auto it = values.find(label);
    if (it == values.end()) fail(ErrorCode::InvalidArgument, "no series labeled " + label);
    return it->second;
  }
};

}  // namespace sshbath

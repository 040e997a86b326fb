#pragma once

#include <vector>

#include "trsp/units.hpp"

namespace trsp {

/// Per-service constants. Volumes are in fixed-point hundredths of a GB.
struct ServiceSpec {
  int id = 0;                    ///< index into the service list
  Volume image_size = 0;         ///< storage footprint of the image
  Volume place_volume = 0;       ///< backhaul data moved when placing
  Volume refresh_volume = 0;     ///< backhaul data moved per refresh
  Volume offload_volume = 0;     ///< backhaul data per offloaded request
  int refresh_interval = 1;      ///< slots between mandatory refreshes

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

using ServiceList = std::vector<ServiceSpec>;

void validate_services(const ServiceList& services);

}  // namespace trsp

#include "trsp/service.hpp"

#include <stdexcept>
#include <string>

namespace trsp {

void ServiceSpec::validate() const {
  auto fail = [this](const std::string& msg) {
    throw std::invalid_argument("service " + std::to_string(id) + ": " + msg);
  };
  if (image_size <= 0) fail("image_size must be positive");
  if (place_volume < 0) fail("place_volume must be non-negative");
  if (refresh_volume < 0) fail("refresh_volume must be non-negative");
  if (offload_volume <= 0) fail("offload_volume must be positive");
  if (refresh_interval < 1) fail("refresh_interval must be at least 1 slot");
}

void validate_services(const ServiceList& services) {
  if (services.empty()) throw std::invalid_argument("service list is empty");
  for (std::size_t i = 0; i < services.size(); ++i) {
    if (services[i].id != static_cast<int>(i)) {
      throw std::invalid_argument("service ids must be 0..s-1 in order");
    }
    services[i].validate();
  }
}

}  // namespace trsp

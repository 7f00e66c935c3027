#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace oranfl {

// Raised by transmission_time() when the link rate is zero. The caller must
// mark the round as an outage instead of dividing by zero.
struct ZeroRateError : std::runtime_error {
    explicit ZeroRateError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the proportional-fair allocator when there are more admitted
// clients than PRBs (it guarantees at least one PRB per client).
struct OverAdmissionError : std::runtime_error {
    explicit OverAdmissionError(const std::string& what) : std::runtime_error(what) {}
};

// One config problem, addressed by key path and source line (line 0 when the
// config was built programmatically rather than parsed from a file).
struct ConfigViolation {
    std::string key;      // e.g. "rat[1].power_levels_w"
    int line = 0;
    std::string message;
};

// Carries every violation found in a config file, each with key path and line.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& file, std::vector<ConfigViolation> violations);
    const std::vector<ConfigViolation>& violations() const { return violations_; }

  private:
    static std::string render(const std::string& file,
                              const std::vector<ConfigViolation>& violations);
    std::vector<ConfigViolation> violations_;
};

}  // namespace oranfl

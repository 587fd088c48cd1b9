#pragma once

// Scenario files: YAML with top-level sections scenario, run, topology,
// radio, olsr, negotiation, flows, interferers, random_interferers and
// link_changes. See README.md for the schema.

#include <cstdint>
#include <map>
#include <string>

#include "meshsim/sim.hpp"

namespace meshsim::cli {

// Schema or syntax problem. line() is 1-based, 0 when unknown.
class ConfigError : public Error {
  public:
    ConfigError(const std::string& source, int line, const std::string& what);
    int line() const { return line_; }

  private:
    int line_;
};

struct RunControl {
    std::uint64_t seed = 1;
    int reps = 10;
};

struct Config {
    sim::Scenario scenario;
    RunControl run;
    std::map<NodeId, std::string> names;
};

Config parse_config(const std::string& text, const std::string& source = "<string>");
// Throws ConfigError when the file cannot be read.
Config load_config(const std::string& path);

// Fully resolved configuration, defaults filled in, as YAML.
std::string dump_config(const Config& config);

}  // namespace meshsim::cli

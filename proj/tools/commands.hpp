#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

namespace fbcli {

struct Context {
    nlohmann::json config = nlohmann::json::object();
    std::filesystem::path out;
    std::uint64_t seed = 1;
    std::optional<int> n;     ///< constants: --n overrides config N
    std::optional<double> s;  ///< constants: --s overrides config s
};

/// Each command returns 0 when its report passes and 1 otherwise; invalid
/// input surfaces as fb::DomainError.
int cmd_constants(const Context& ctx);
int cmd_bubble_energy(const Context& ctx);
int cmd_verify_estimates(const Context& ctx);
int cmd_capacity(const Context& ctx);
int cmd_sphere_map(const Context& ctx);
int cmd_solve(const Context& ctx);

}  // namespace fbcli

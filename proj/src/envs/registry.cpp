#include <cstdlib>

#include "oprlab/envs/deep_chain.hpp"
#include "oprlab/envs/distractor_grid.hpp"
#include "oprlab/envs/env.hpp"
#include "oprlab/envs/mini_defense.hpp"
#include "oprlab/errors.hpp"

namespace oprlab::envs {
namespace {

std::size_t get_count(const EnvParams& params, const std::string& key,
                      std::size_t fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    char* end = nullptr;
    const long v = std::strtol(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0' || v <= 0) {
        throw ConfigError("env parameter " + key + " must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

void check_known(const EnvParams& params, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : params) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown env parameter: " + key);
    }
}

}  // namespace

std::unique_ptr<Env> make_env(const std::string& name, const EnvParams& params) {
    if (name == "deep_chain") {
        check_known(params, {"n"});
        return std::make_unique<DeepChain>(get_count(params, "n", 20));
    }
    if (name == "distractor_grid") {
        check_known(params, {"side"});
        return std::make_unique<DistractorGrid>(get_count(params, "side", 7));
    }
    if (name == "mini_defense") {
        check_known(params, {"hosts", "horizon"});
        return std::make_unique<MiniDefense>(get_count(params, "hosts", 5),
                                             get_count(params, "horizon", 30));
    }
    throw ConfigError("unknown environment: " + name);
}

std::vector<EnvSpec> list_envs() {
    return {
        DeepChain(20).spec(),
        DistractorGrid(7).spec(),
        MiniDefense(5, 30).spec(),
    };
}

}  // namespace oprlab::envs

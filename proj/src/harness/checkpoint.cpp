#include "oprlab/harness/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "oprlab/errors.hpp"

namespace oprlab::harness {
namespace {

void expect_tag(std::istream& is, const std::string& want) {
    std::string got;
    if (!(is >> got) || got != want) {
        throw IoError("checkpoint: expected '" + want + "', got '" + got + "'");
    }
}

void write_values(std::ostream& os, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    os << "\n";
}

void read_values(std::istream& is, std::vector<double>& v, const char* what) {
    for (double& x : v) {
        if (!(is >> x)) throw IoError(std::string("checkpoint: truncated ") + what);
    }
}

}  // namespace

void write_mlp(std::ostream& os, const numkit::MlpParams& mlp) {
    os << "mlp " << mlp.layer_sizes.size() << " "
       << numkit::activation_name(mlp.activation) << "\n";
    os << "sizes";
    for (std::size_t s : mlp.layer_sizes) os << " " << s;
    os << "\n";
    for (std::size_t i = 0; i < mlp.num_layers(); ++i) {
        os << "weight " << i << " " << mlp.weights[i].rows << " "
           << mlp.weights[i].cols << "\n";
        write_values(os, mlp.weights[i].data);
        os << "bias " << i << " " << mlp.biases[i].size() << "\n";
        write_values(os, mlp.biases[i]);
    }
}

numkit::MlpParams read_mlp(std::istream& is) {
    expect_tag(is, "mlp");
    std::size_t n_sizes = 0;
    std::string act;
    if (!(is >> n_sizes >> act)) throw IoError("checkpoint: truncated mlp header");
    expect_tag(is, "sizes");
    std::vector<std::size_t> sizes(n_sizes);
    for (auto& s : sizes) {
        if (!(is >> s)) throw IoError("checkpoint: truncated layer sizes");
    }
    numkit::MlpParams mlp =
        numkit::MlpParams::zeros(sizes, numkit::activation_from_name(act));
    for (std::size_t i = 0; i < mlp.num_layers(); ++i) {
        std::size_t idx = 0, rows = 0, cols = 0;
        expect_tag(is, "weight");
        if (!(is >> idx >> rows >> cols) || idx != i) {
            throw IoError("checkpoint: malformed weight header at layer " +
                          std::to_string(i));
        }
        if (rows != mlp.weights[i].rows || cols != mlp.weights[i].cols) {
            throw IoError("checkpoint: weight shape mismatch at layer " +
                          std::to_string(i));
        }
        read_values(is, mlp.weights[i].data, "weight matrix");
        expect_tag(is, "bias");
        std::size_t blen = 0;
        if (!(is >> idx >> blen) || idx != i || blen != mlp.biases[i].size()) {
            throw IoError("checkpoint: bias shape mismatch at layer " +
                          std::to_string(i));
        }
        read_values(is, mlp.biases[i], "bias vector");
    }
    return mlp;
}

void write_moments(std::ostream& os, const numkit::MlpGrads& g) {
    os << "moments " << g.weights.size() << "\n";
    for (std::size_t i = 0; i < g.weights.size(); ++i) {
        os << "m " << i << " " << g.weights[i].rows << " " << g.weights[i].cols
           << " " << g.biases[i].size() << "\n";
        write_values(os, g.weights[i].data);
        write_values(os, g.biases[i]);
    }
}

void read_moments_into(std::istream& is, numkit::MlpGrads& g) {
    expect_tag(is, "moments");
    std::size_t layers = 0;
    if (!(is >> layers) || layers != g.weights.size()) {
        throw IoError("checkpoint: moment layer count mismatch");
    }
    for (std::size_t i = 0; i < layers; ++i) {
        expect_tag(is, "m");
        std::size_t idx = 0, rows = 0, cols = 0, blen = 0;
        if (!(is >> idx >> rows >> cols >> blen) || idx != i ||
            rows != g.weights[i].rows || cols != g.weights[i].cols ||
            blen != g.biases[i].size()) {
            throw IoError("checkpoint: moment shape mismatch at layer " +
                          std::to_string(i));
        }
        read_values(is, g.weights[i].data, "first/second moment");
        read_values(is, g.biases[i], "moment bias");
    }
}

void write_adam(std::ostream& os, const char* name, const numkit::AdamState& s) {
    os << "adam " << name << " " << s.step_count << " " << s.beta1 << " "
       << s.beta2 << " " << s.epsilon << "\n";
    write_moments(os, s.first_moment);
    write_moments(os, s.second_moment);
}

void read_adam_into(std::istream& is, const char* name, numkit::AdamState& s) {
    expect_tag(is, "adam");
    expect_tag(is, name);
    if (!(is >> s.step_count >> s.beta1 >> s.beta2 >> s.epsilon)) {
        throw IoError(std::string("checkpoint: truncated adam state for ") + name);
    }
    read_moments_into(is, s.first_moment);
    read_moments_into(is, s.second_moment);
}

void write_checkpoint_header(std::ostream& os) {
    os << kCheckpointMagic << " v" << kCheckpointVersion << "\n";
    os.precision(17);
}

void read_checkpoint_header(std::istream& is) {
    std::string magic, version;
    if (!(is >> magic >> version)) throw IoError("checkpoint: missing header");
    if (magic != kCheckpointMagic) throw IoError("checkpoint: bad magic '" + magic + "'");
    if (version != "v" + std::to_string(kCheckpointVersion)) {
        throw IoError("checkpoint: unsupported version '" + version + "'");
    }
}

void write_agent_section(std::ostream& os, const agent::AgentParams& params,
                         const agent::AgentOptimizer& opt) {
    os << "agent " << (params.shared_trunk ? 1 : 0) << "\n";
    write_mlp(os, params.policy_net);
    write_mlp(os, params.value_net);
    write_adam(os, "policy", opt.policy);
    write_adam(os, "value", opt.value);
}

void read_agent_section(std::istream& is, agent::AgentParams& params,
                        agent::AgentOptimizer& opt) {
    expect_tag(is, "agent");
    int shared = 0;
    if (!(is >> shared)) throw IoError("checkpoint: truncated agent header");
    agent::AgentParams p;
    p.shared_trunk = shared != 0;
    p.policy_net = read_mlp(is);
    p.value_net = read_mlp(is);
    agent::AgentOptimizer o = agent::AgentOptimizer::for_params(p);
    read_adam_into(is, "policy", o.policy);
    read_adam_into(is, "value", o.value);
    params = std::move(p);
    opt = std::move(o);
}

void save_checkpoint(const std::string& path, const agent::AgentParams& params,
                     const agent::AgentOptimizer& opt) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path);
    write_checkpoint_header(os);
    write_agent_section(os, params, opt);
    os << "trainer 0\n";
    os << "end\n";
    if (!os) throw IoError("failed writing checkpoint: " + path);
}

void load_checkpoint(const std::string& path, agent::AgentParams& params,
                     agent::AgentOptimizer& opt) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open checkpoint: " + path);
    read_checkpoint_header(is);
    agent::AgentParams p;
    agent::AgentOptimizer o;
    read_agent_section(is, p, o);
    expect_tag(is, "trainer");
    int has_trainer = 0;
    if (!(is >> has_trainer)) throw IoError("checkpoint: truncated trainer flag");
    if (has_trainer == 0) expect_tag(is, "end");
    params = std::move(p);
    opt = std::move(o);
}

}  // namespace oprlab::harness

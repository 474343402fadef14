// Copyright 2026 The mdmsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.h"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace mdm::cli {

namespace {

// Typed access to one YAML mapping, remembering which keys were read so that
// unknown (misspelled) keys can be reported.
class Section {
  public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (!node_.IsMap()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected a mapping");
        }
    }

    std::string field(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string &key) {
        seen_.insert(key);
        return static_cast<bool>(node_[key]);
    }

    YAML::Node raw(const std::string &key) {
        if (!has(key)) {
            throw ConfigError(field(key), "missing required field");
        }
        return node_[key];
    }

    template <typename T>
    T get(const std::string &key) {
        auto n = raw(key);
        try {
            return n.as<T>();
        } catch (const YAML::Exception &) {
            throw ConfigError(field(key), fmt::format("cannot read value '{}'", YAML::Dump(n)));
        }
    }

    template <typename T>
    T get(const std::string &key, T fallback) {
        return has(key) ? get<T>(key) : fallback;
    }

    double real(const std::string &key) { return get<double>(key); }
    double real(const std::string &key, double fallback) { return get<double>(key, fallback); }

    double positive(const std::string &key) {
        double v = real(key);
        if (!(v > 0.0)) {
            throw ConfigError(field(key), fmt::format("must be > 0 (got {})", v));
        }
        return v;
    }

    double positive(const std::string &key, double fallback) { return has(key) ? positive(key) : fallback; }

    double nonnegative(const std::string &key, double fallback) {
        if (!has(key)) {
            return fallback;
        }
        double v = real(key);
        if (!(v >= 0.0)) {
            throw ConfigError(field(key), fmt::format("must be >= 0 (got {})", v));
        }
        return v;
    }

    std::size_t count(const std::string &key, std::size_t fallback) {
        if (!has(key)) {
            return fallback;
        }
        auto v = get<long long>(key);
        if (v < 0) {
            throw ConfigError(field(key), fmt::format("must be a nonnegative integer (got {})", v));
        }
        return static_cast<std::size_t>(v);
    }

    Section child(const std::string &key) { return Section(raw(key), field(key)); }

    std::vector<double> reals(const std::string &key) {
        auto n = raw(key);
        if (!n.IsSequence()) {
            throw ConfigError(field(key), "expected a list of numbers");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < n.size(); ++i) {
            try {
                out.push_back(n[i].as<double>());
            } catch (const YAML::Exception &) {
                throw ConfigError(fmt::format("{}[{}]", field(key), i), "expected a number");
            }
        }
        return out;
    }

    RMatrix matrix(const std::string &key) {
        auto n = raw(key);
        if (!n.IsSequence() || n.size() == 0) {
            throw ConfigError(field(key), "expected a non-empty list of rows");
        }
        RMatrix m;
        for (std::size_t r = 0; r < n.size(); ++r) {
            if (!n[r].IsSequence()) {
                throw ConfigError(fmt::format("{}[{}]", field(key), r), "expected a row list");
            }
            if (r == 0) {
                m.resize(static_cast<Eigen::Index>(n.size()), static_cast<Eigen::Index>(n[r].size()));
            } else if (static_cast<Eigen::Index>(n[r].size()) != m.cols()) {
                throw ConfigError(fmt::format("{}[{}]", field(key), r), "ragged matrix rows");
            }
            for (std::size_t c = 0; c < n[r].size(); ++c) {
                try {
                    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = n[r][c].as<double>();
                } catch (const YAML::Exception &) {
                    throw ConfigError(fmt::format("{}[{}][{}]", field(key), r, c), "expected a number");
                }
            }
        }
        return m;
    }

    /// Rejects keys that were never looked at.
    void finish() const {
        for (const auto &kv : node_) {
            auto key = kv.first.as<std::string>();
            if (!seen_.contains(key)) {
                throw ConfigError(field(key), "unknown field");
            }
        }
    }

    const std::string &path() const { return path_; }

  private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename F>
void checked(const std::string &field, F &&f) {
    try {
        f();
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError(field, e.what());
    }
}

MixingChoice read_mixing(Section s) {
    MixingChoice m;
    auto kind = s.get<std::string>("kind");
    if (kind == "identity") {
        m.kind = MixingChoice::Kind::identity;
    } else if (kind == "reversal") {
        m.kind = MixingChoice::Kind::reversal;
    } else if (kind == "rotation") {
        m.kind = MixingChoice::Kind::rotation;
        m.angle_rad = s.real("angle_rad");
    } else if (kind == "random") {
        m.kind = MixingChoice::Kind::random;
    } else {
        throw ConfigError(s.field("kind"), fmt::format("unknown mixing kind '{}' (identity, reversal, rotation, random)", kind));
    }
    s.finish();
    return m;
}

void check_mixing(const MixingChoice &m, std::size_t modes, const std::string &field) {
    if (m.kind == MixingChoice::Kind::rotation && modes != 2) {
        throw ConfigError(field, fmt::format("rotation mixing needs exactly 2 modes (have {})", modes));
    }
}

BankRingDesign read_bank_ring(Section s) {
    BankRingDesign d;
    d.fwhm_nm = s.positive("fwhm_nm", d.fwhm_nm);
    d.heater_shift_nm_per_unit = s.real("heater_shift_nm_per_unit", d.heater_shift_nm_per_unit);
    d.max_drop = s.real("max_drop", d.max_drop);
    d.resonance_offset_nm = s.real("resonance_offset_nm", d.resonance_offset_nm);
    s.finish();
    checked(s.path(), [&] {
        RingSpec probe{1550.0 + d.resonance_offset_nm, d.fwhm_nm, d.heater_shift_nm_per_unit, d.max_drop};
        probe.validate();
    });
    return d;
}

RingSpec read_ring(Section s) {
    RingSpec r;
    r.resonance_nm = s.real("resonance_nm");
    r.fwhm_nm = s.positive("fwhm_nm");
    r.heater_shift_nm_per_unit = s.real("heater_shift_nm_per_unit");
    r.max_drop = s.real("max_drop", 1.0);
    s.finish();
    checked(s.path(), [&] { r.validate(); });
    return r;
}

MziExperiment read_mzi(Section s) {
    MziExperiment e;
    auto &spec = e.spec;
    {
        auto c = s.child("coupler");
        spec.coupler.width_nm = c.positive("width_nm");
        spec.coupler.length_um = c.positive("length_um");
        spec.coupler.target_mode = c.count("target_mode", 0);
        spec.coupler.matched_width_nm = c.positive("matched_width_nm");
        spec.coupler.beat_length_um = c.positive("beat_length_um");
        spec.coupler.detuning_slope_per_nm = c.real("detuning_slope_per_nm", 0.0);
        c.finish();
        checked(c.path(), [&] { spec.coupler.validate(); });
    }
    if (s.has("forced_alpha")) {
        spec.forced_alpha = s.real("forced_alpha");
        if (!(*spec.forced_alpha >= 0.0 && *spec.forced_alpha <= 1.0)) {
            throw ConfigError(s.field("forced_alpha"), fmt::format("must lie in [0, 1] (got {})", *spec.forced_alpha));
        }
    }
    spec.delta_length_um = s.positive("delta_length_um");
    spec.group_index = s.positive("group_index");
    {
        auto w = s.child("window");
        spec.window.start_nm = w.positive("start_nm");
        spec.window.stop_nm = w.positive("stop_nm");
        spec.window.num_points = w.count("points", 2001);
        if (spec.window.stop_nm <= spec.window.start_nm) {
            throw ConfigError(w.field("stop_nm"), "must exceed start_nm");
        }
        if (spec.window.num_points < 16) {
            throw ConfigError(w.field("points"), fmt::format("must be >= 16 (got {})", spec.window.num_points));
        }
        w.finish();
    }
    spec.noise_sigma = s.nonnegative("noise_sigma", 0.0);
    s.finish();
    checked(s.path(), [&] { spec.validate(); });
    return e;
}

BankCalibrateExperiment read_bank(Section s) {
    BankCalibrateExperiment e;
    e.modes = s.count("modes", e.modes);
    if (e.modes == 0 || e.modes > 16) {
        throw ConfigError(s.field("modes"), fmt::format("must lie in [1, 16] (got {})", e.modes));
    }
    e.wavelength_nm = s.positive("wavelength_nm", e.wavelength_nm);
    if (s.has("ring")) {
        e.ring = read_bank_ring(s.child("ring"));
    }
    e.mixing = read_mixing(s.child("mixing"));
    check_mixing(e.mixing, e.modes, s.field("mixing"));
    e.probe_noise_sigma = s.nonnegative("probe_noise_sigma", 0.0);
    e.tolerance = s.positive("tolerance", e.tolerance);
    if (s.has("weights")) {
        auto w = s.reals("weights");
        if (w.size() != e.modes) {
            throw ConfigError(s.field("weights"), fmt::format("expected {} weights, got {}", e.modes, w.size()));
        }
        RVector v = Eigen::Map<RVector>(w.data(), static_cast<Eigen::Index>(w.size()));
        checked(s.field("weights"), [&] { WeightVector check(v); });
        e.weights = v;
    }
    s.finish();
    checked(s.path(), [&] { make_bank(e.modes, {e.wavelength_nm}, e.ring); });
    return e;
}

NetworkExperiment read_network(Section s) {
    NetworkExperiment e;
    double pump_wavelength = s.positive("pump_wavelength_nm", 1550.0);
    auto list = s.raw("neurons");
    if (!list.IsSequence() || list.size() == 0) {
        throw ConfigError(s.field("neurons"), "expected a non-empty list of neurons");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        Section n(list[i], fmt::format("{}[{}]", s.field("neurons"), i));
        NeuronSpec spec;
        spec.axon_ring = read_ring(n.child("axon"));
        spec.pump_power = n.positive("pump_power", 1.0);
        spec.pump_wavelength_nm = pump_wavelength;
        spec.bias = n.real("bias", 0.0);
        spec.gain = n.real("gain", 1.0);
        spec.mode_channel = i;
        n.finish();
        checked(n.path(), [&] { spec.validate(); });
        e.neurons.push_back(spec);
    }
    auto n = static_cast<Eigen::Index>(e.neurons.size());
    e.weights = s.matrix("weights");
    if (e.weights.rows() != n || e.weights.cols() != n) {
        throw ConfigError(s.field("weights"),
                          fmt::format("expected a {}x{} matrix, got {}x{}", n, n, e.weights.rows(), e.weights.cols()));
    }
    if (e.weights.cwiseAbs().maxCoeff() > 1.0) {
        throw ConfigError(s.field("weights"), "entries must lie in [-1, 1]");
    }
    if (s.has("bank_ring")) {
        e.bank_ring = read_bank_ring(s.child("bank_ring"));
    }
    e.cascade_drop = s.real("cascade_drop", e.cascade_drop);
    if (!(e.cascade_drop > 0.0 && e.cascade_drop < 1.0)) {
        throw ConfigError(s.field("cascade_drop"), fmt::format("must lie in (0, 1) (got {})", e.cascade_drop));
    }
    e.bus_mixing = read_mixing(s.child("bus_mixing"));
    check_mixing(e.bus_mixing, e.neurons.size(), s.field("bus_mixing"));
    e.compensate = s.get<bool>("compensate", e.compensate);
    e.calibration_noise_sigma = s.nonnegative("calibration_noise_sigma", 0.0);
    auto sign = s.get<std::string>("feedback_sign", "drop-minus-through");
    if (sign == "drop-minus-through") {
        e.feedback_sign = FeedbackSign::drop_minus_through;
    } else if (sign == "through-minus-drop") {
        e.feedback_sign = FeedbackSign::through_minus_drop;
    } else {
        throw ConfigError(s.field("feedback_sign"),
                          fmt::format("unknown sign '{}' (drop-minus-through, through-minus-drop)", sign));
    }
    e.tolerance = s.positive("tolerance", e.tolerance);
    e.max_iterations = s.count("max_iterations", e.max_iterations);
    if (e.max_iterations == 0) {
        throw ConfigError(s.field("max_iterations"), "must be >= 1");
    }
    e.damping = s.real("damping", e.damping);
    if (!(e.damping > 0.0 && e.damping <= 1.0)) {
        throw ConfigError(s.field("damping"), fmt::format("must lie in (0, 1] (got {})", e.damping));
    }
    s.finish();
    checked(s.path(), [&] { make_hairpin(e.neurons, MixingMatrix::identity(e.neurons.size()), e.bank_ring, e.cascade_drop); });
    return e;
}

DemixExperiment read_demix(Section s) {
    DemixExperiment e;
    e.modes = s.count("modes", e.modes);
    if (e.modes == 0 || e.modes > 16) {
        throw ConfigError(s.field("modes"), fmt::format("must lie in [1, 16] (got {})", e.modes));
    }
    if (s.has("wavelengths_nm")) {
        e.wavelengths_nm = s.reals("wavelengths_nm");
        if (e.wavelengths_nm.empty()) {
            throw ConfigError(s.field("wavelengths_nm"), "need at least one wavelength");
        }
    }
    if (s.has("ring")) {
        e.ring = read_bank_ring(s.child("ring"));
    }
    e.mixing = read_mixing(s.child("mixing"));
    check_mixing(e.mixing, e.modes, s.field("mixing"));
    if (s.has("input_powers")) {
        auto p = s.reals("input_powers");
        auto expected = e.modes * e.wavelengths_nm.size();
        if (p.size() != expected) {
            throw ConfigError(s.field("input_powers"), fmt::format("expected {} channel powers, got {}", expected, p.size()));
        }
        RVector v = Eigen::Map<RVector>(p.data(), static_cast<Eigen::Index>(p.size()));
        checked(s.field("input_powers"), [&] { ChannelPowerVector check(v); });
        e.input_powers = v;
    }
    s.finish();
    checked(s.path(), [&] { make_bank(e.modes, e.wavelengths_nm, e.ring); });
    return e;
}

ExperimentConfig parse_root(const YAML::Node &root) {
    Section s(root, "");
    ExperimentConfig cfg;
    auto name = s.get<std::string>("experiment");
    if (name == "mzi-sweep") {
        cfg.kind = ExperimentKind::mzi_sweep;
        cfg.body = read_mzi(s.child("mzi"));
    } else if (name == "bank-calibrate") {
        cfg.kind = ExperimentKind::bank_calibrate;
        cfg.body = read_bank(s.child("bank"));
    } else if (name == "network-run") {
        cfg.kind = ExperimentKind::network_run;
        cfg.body = read_network(s.child("network"));
    } else if (name == "demix") {
        cfg.kind = ExperimentKind::demix;
        cfg.body = read_demix(s.child("demix"));
    } else {
        throw ConfigError("experiment",
                          fmt::format("unknown experiment '{}' (mzi-sweep, bank-calibrate, network-run, demix)", name));
    }
    cfg.seed = s.get<std::uint64_t>("seed");
    cfg.output_dir = s.get<std::string>("output_dir");
    if (cfg.output_dir.empty()) {
        throw ConfigError("output_dir", "must not be empty");
    }
    s.finish();
    return cfg;
}

}  // namespace

ConfigError::ConfigError(const std::string &field, const std::string &problem)
    : std::runtime_error(fmt::format("config field '{}': {}", field, problem)), field_(field) {
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::mzi_sweep:
            return "mzi-sweep";
        case ExperimentKind::bank_calibrate:
            return "bank-calibrate";
        case ExperimentKind::network_run:
            return "network-run";
        case ExperimentKind::demix:
            return "demix";
    }
    return "unknown";
}

MixingMatrix MixingChoice::build(std::size_t modes, Rng &rng) const {
    switch (kind) {
        case Kind::identity:
            return MixingMatrix::identity(modes);
        case Kind::reversal:
            return MixingMatrix::reversal(modes);
        case Kind::rotation:
            return MixingMatrix::rotation(angle_rad);
        case Kind::random:
            return MixingMatrix::random(modes, rng);
    }
    throw std::logic_error("unhandled mixing kind");
}

std::string MixingChoice::describe() const {
    switch (kind) {
        case Kind::identity:
            return "identity";
        case Kind::reversal:
            return "reversal";
        case Kind::rotation:
            return fmt::format("rotation(angle_rad={})", angle_rad);
        case Kind::random:
            return "random (haar)";
    }
    return "unknown";
}

ExperimentConfig parse_config(const std::string &text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception &e) {
        throw ConfigError("<root>", fmt::format("YAML syntax error at line {}: {}", e.mark.line + 1, e.msg));
    }
    return parse_root(root);
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("<file>", fmt::format("cannot read config '{}'", path.string()));
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace mdm::cli

#include "rwg/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace rwg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Parser {
    std::string origin;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream msg;
        msg << origin << ":" << line_no << ": " << what;
        throw config_error(msg.str());
    }

    double to_double(const std::string& v) const {
        try {
            size_t pos;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) fail("trailing characters in number '" + v + "'");
            return x;
        } catch (const config_error&) {
            throw;
        } catch (...) {
            fail("expected a number, got '" + v + "'");
        }
    }

    long long to_int(const std::string& v) const {
        try {
            size_t pos;
            const long long x = std::stoll(v, &pos);
            if (pos != v.size()) fail("trailing characters in integer '" + v + "'");
            return x;
        } catch (const config_error&) {
            throw;
        } catch (...) {
            fail("expected an integer, got '" + v + "'");
        }
    }

    bool to_bool(const std::string& v) const {
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        fail("expected a boolean, got '" + v + "'");
    }

    std::vector<double> to_double_list(const std::string& v) const {
        std::vector<double> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(to_double(item));
        }
        if (out.empty()) fail("expected a comma-separated list of numbers");
        return out;
    }

    std::vector<int> to_int_list(const std::string& v) const {
        std::vector<int> out;
        for (double x : to_double_list(v)) out.push_back(static_cast<int>(x));
        return out;
    }
};

} // namespace

CovarianceModel ExperimentConfig::covariance() const {
    Kernel1D kz;
    kz.family = kernel;
    kz.variance = variance;
    kz.corr_length = corr_length;
    if (kind == CovarianceModel::Kind::type_two)
        return CovarianceModel::type_two(kz);
    TransverseKernel tk;
    tk.family = transverse_family;
    tk.corr_length = transverse_corr_length;
    return CovarianceModel::type_one(tk, kz);
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_text(ss.str(), path);
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text,
                                              const std::string& origin) {
    ExperimentConfig cfg;
    Parser p{origin, 0};

    // key dispatch: section.key -> setter
    using Setter = std::function<void(const std::string&)>;
    std::map<std::string, Setter> keys;
    keys["waveguide.n"] = [&](const std::string& v) { cfg.waveguide.n = p.to_double(v); };
    keys["waveguide.d"] = [&](const std::string& v) { cfg.waveguide.d = p.to_double(v); };
    keys["waveguide.k"] = [&](const std::string& v) { cfg.waveguide.k = p.to_double(v); };
    keys["waveguide.x_s"] = [&](const std::string& v) { cfg.waveguide.x_s = p.to_double(v); };
    keys["perturbation.type"] = [&](const std::string& v) {
        if (v == "typeI") cfg.kind = CovarianceModel::Kind::type_one;
        else if (v == "typeII") cfg.kind = CovarianceModel::Kind::type_two;
        else p.fail("perturbation.type must be typeI or typeII, got '" + v + "'");
    };
    keys["perturbation.kernel"] = [&](const std::string& v) {
        if (v == "gaussian") cfg.kernel = KernelFamily::gaussian;
        else if (v == "exponential") cfg.kernel = KernelFamily::exponential;
        else p.fail("perturbation.kernel must be gaussian or exponential");
    };
    keys["perturbation.variance"] = [&](const std::string& v) {
        cfg.variance = p.to_double(v);
        if (cfg.variance < 0) p.fail("perturbation.variance must be >= 0");
    };
    keys["perturbation.corr_length"] = [&](const std::string& v) {
        cfg.corr_length = p.to_double(v);
        if (!(cfg.corr_length > 0)) p.fail("perturbation.corr_length must be > 0");
    };
    keys["perturbation.transverse_kernel"] = [&](const std::string& v) {
        if (v == "gaussian") cfg.transverse_family = TransverseKernel::Family::gaussian;
        else if (v == "exponential") cfg.transverse_family = TransverseKernel::Family::exponential;
        else p.fail("perturbation.transverse_kernel must be gaussian or exponential");
    };
    keys["perturbation.transverse_corr_length"] = [&](const std::string& v) {
        cfg.transverse_corr_length = p.to_double(v);
        if (!(cfg.transverse_corr_length > 0))
            p.fail("perturbation.transverse_corr_length must be > 0");
    };
    keys["numerics.transverse_order"] = [&](const std::string& v) {
        cfg.quad.transverse_order = static_cast<int>(p.to_int(v));
        if (cfg.quad.transverse_order < 4) p.fail("numerics.transverse_order must be >= 4");
    };
    keys["numerics.gamma_panels"] = [&](const std::string& v) {
        cfg.quad.gamma_panels = static_cast<int>(p.to_int(v));
        if (cfg.quad.gamma_panels < 1) p.fail("numerics.gamma_panels must be >= 1");
    };
    keys["numerics.gamma_order"] = [&](const std::string& v) {
        cfg.quad.gamma_order = static_cast<int>(p.to_int(v));
        if (cfg.quad.gamma_order < 2) p.fail("numerics.gamma_order must be >= 2");
    };
    keys["numerics.rel_tol"] = [&](const std::string& v) {
        cfg.quad.rel_tol = p.to_double(v);
        if (!(cfg.quad.rel_tol > 0)) p.fail("numerics.rel_tol must be > 0");
    };
    keys["numerics.grid"] = [&](const std::string& v) {
        cfg.grid = static_cast<int>(p.to_int(v));
        if (cfg.grid < 16) p.fail("numerics.grid must be >= 16");
    };
    keys["mc.paths"] = [&](const std::string& v) {
        cfg.mc.paths = p.to_int(v);
        if (cfg.mc.paths < 100) p.fail("mc.paths must be >= 100");
    };
    keys["mc.seed"] = [&](const std::string& v) {
        cfg.mc.seed = static_cast<std::uint64_t>(p.to_int(v));
    };
    keys["mc.dz"] = [&](const std::string& v) {
        cfg.mc.dz = p.to_double(v);
        if (!(cfg.mc.dz > 0)) p.fail("mc.dz must be > 0");
    };
    keys["mc.z_max"] = [&](const std::string& v) {
        cfg.mc.z_max = p.to_double(v);
        if (!(cfg.mc.z_max >= 0)) p.fail("mc.z_max must be >= 0");
    };
    keys["mc.workers"] = [&](const std::string& v) {
        cfg.mc.workers = static_cast<int>(p.to_int(v));
        if (cfg.mc.workers < 1) p.fail("mc.workers must be >= 1");
    };
    keys["run.z_points"] = [&](const std::string& v) {
        cfg.z_points = p.to_double_list(v);
        for (double z : cfg.z_points)
            if (z < 0) p.fail("run.z_points must be >= 0");
    };
    keys["run.x_probe"] = [&](const std::string& v) { cfg.x_probe = p.to_double(v); };
    keys["run.out_dir"] = [&](const std::string& v) { cfg.out_dir = v; };
    keys["run.synthetic"] = [&](const std::string& v) { cfg.synthetic = p.to_bool(v); };
    keys["run.gamma_const"] = [&](const std::string& v) {
        cfg.gamma_const = p.to_double(v);
        if (!(cfg.gamma_const > 0)) p.fail("run.gamma_const must be > 0");
    };
    keys["run.lambda1"] = [&](const std::string& v) {
        cfg.lambda1 = p.to_double_list(v);
        for (double x : cfg.lambda1)
            if (x < 0) p.fail("run.lambda1 entries must be >= 0");
    };
    keys["run.theta"] = [&](const std::string& v) {
        cfg.theta = p.to_double(v);
        if (!(cfg.theta >= 0)) p.fail("run.theta must be >= 0");
    };
    keys["run.theta_list"] = [&](const std::string& v) {
        cfg.theta_list = p.to_double_list(v);
    };
    keys["run.expansion_mode"] = [&](const std::string& v) {
        if (v != "dissipation" && v != "coupling")
            p.fail("run.expansion_mode must be dissipation or coupling");
        cfg.expansion_mode = v;
    };
    keys["run.ns"] = [&](const std::string& v) {
        cfg.ns = p.to_int_list(v);
        for (int n : cfg.ns)
            if (n < 2) p.fail("run.ns entries must be >= 2");
    };
    keys["run.lambda_absorb"] = [&](const std::string& v) {
        cfg.lambda_absorb = p.to_double(v);
        if (!(cfg.lambda_absorb >= 0)) p.fail("run.lambda_absorb must be >= 0");
    };
    keys["run.sample_dump"] = [&](const std::string& v) {
        cfg.sample_dump = p.to_int(v);
        if (cfg.sample_dump < 0) p.fail("run.sample_dump must be >= 0");
    };

    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        ++p.line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') p.fail("malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "waveguide" && section != "perturbation" &&
                section != "numerics" && section != "mc" && section != "run")
                p.fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) p.fail("key '" + key + "' outside any [section]");
        const std::string full = section + "." + key;
        const auto it = keys.find(full);
        if (it == keys.end()) p.fail("unknown key '" + full + "'");
        it->second(value);
    }

    cfg.waveguide.validate(); // range checks with key names
    return cfg;
}

} // namespace rwg

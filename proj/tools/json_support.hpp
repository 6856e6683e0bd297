#pragma once

// JSON descriptor parsing for experiment configs, with path-annotated errors,
// plus the resolved-config hash that stamps every output file.

#include <openssl/sha.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "perpetua/legendre.hpp"
#include "perpetua/models.hpp"
#include "perpetua/regvar.hpp"

namespace perpetua_cli {

using nlohmann::json;

/// Config violation with the offending path; maps to exit code 2.
struct config_error : std::runtime_error {
    config_error(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what) {}
};

/// Model/command mismatch (e.g. envelope with an infinite lambda*); exit code 3.
struct mismatch_error : std::runtime_error {
    explicit mismatch_error(const std::string& what) : std::runtime_error(what) {}
};

inline double require_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw config_error(path, "expected a number");
    return j.get<double>();
}

inline double number_or(const json& parent, const std::string& key, const std::string& path,
                        double fallback) {
    if (!parent.contains(key)) return fallback;
    return require_number(parent.at(key), path + "." + key);
}

inline std::string require_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw config_error(path, "expected a string");
    return j.get<std::string>();
}

inline std::string string_or(const json& parent, const std::string& key,
                             const std::string& path, const std::string& fallback) {
    if (!parent.contains(key)) return fallback;
    return require_string(parent.at(key), path + "." + key);
}

inline std::vector<double> require_sorted_grid(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw config_error(path, "expected a nonempty array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw config_error(path, "grid entries must be numbers");
        out.push_back(v.get<double>());
        if (out.size() > 1 && !(out.back() > out[out.size() - 2]))
            throw config_error(path, "grid must be strictly increasing");
    }
    return out;
}

inline perpetua::RegVarFn parse_regvar(const json& j, const std::string& path) {
    if (!j.is_object()) throw config_error(path, "expected an object");
    const double rho = require_number(j.at("rho"), path + ".rho");
    try {
        return perpetua::RegVarFn(rho, number_or(j, "scale", path, 1.0),
                                  number_or(j, "log_exponent", path, 0.0),
                                  number_or(j, "domain_floor", path, 0.0));
    } catch (const std::invalid_argument& e) {
        throw config_error(path, e.what());
    }
}

inline perpetua::AlphaFn parse_alpha(const json& j, const std::string& path, double rho) {
    if (!j.is_object()) throw config_error(path, "expected an object");
    const std::string variant = require_string(j.at("variant"), path + ".variant");
    try {
        if (variant == "case_a") return perpetua::AlphaFn::case_a(rho);
        if (variant == "case_b") return perpetua::AlphaFn::case_b();
        if (variant == "table") {
            if (!j.contains("knots")) throw config_error(path, "table variant needs knots");
            std::vector<double> as, vs;
            for (const auto& knot : j.at("knots")) {
                if (!knot.is_array() || knot.size() != 2)
                    throw config_error(path + ".knots", "each knot must be [a, value]");
                as.push_back(knot[0].get<double>());
                vs.push_back(knot[1].get<double>());
            }
            return perpetua::AlphaFn::table(std::move(as), std::move(vs));
        }
    } catch (const std::invalid_argument& e) {
        throw config_error(path, e.what());
    }
    throw config_error(path + ".variant", "unknown variant '" + variant + "'");
}

inline perpetua::PairModel parse_model(const json& j, const std::string& path = "model") {
    if (!j.is_object()) throw config_error(path, "expected an object");
    const std::string kind = require_string(j.at("kind"), path + ".kind");
    try {
        if (kind == "independent") {
            if (!j.contains("A") || !j.contains("B"))
                throw config_error(path, "independent model needs A and B");
            const json& ja = j.at("A");
            const std::string a_law = require_string(ja.at("law"), path + ".A.law");
            perpetua::ALaw A;
            if (a_law == "uniform")
                A = perpetua::UniformA{require_number(ja.at("a_plus"), path + ".A.a_plus")};
            else if (a_law == "point_mass")
                A = perpetua::PointMassA{require_number(ja.at("a_plus"), path + ".A.a_plus")};
            else if (a_law == "power")
                A = perpetua::PowerA{require_number(ja.at("a_plus"), path + ".A.a_plus"),
                                     require_number(ja.at("shape"), path + ".A.shape")};
            else
                throw config_error(path + ".A.law", "unknown law '" + a_law + "'");
            const json& jb = j.at("B");
            perpetua::BLaw B;
            if (jb.contains("constant"))
                B = perpetua::ConstantB{require_number(jb.at("constant"), path + ".B.constant")};
            else
                B = perpetua::WeibullB{require_number(jb.at("sigma"), path + ".B.sigma"),
                                       require_number(jb.at("rho"), path + ".B.rho")};
            return perpetua::PairModel::independent(A, B);
        }
        if (kind == "atom_survival") {
            const double rho = require_number(j.at("rho"), path + ".rho");
            return perpetua::PairModel::atom_survival(
                rho, parse_alpha(j.at("alpha"), path + ".alpha", rho));
        }
    } catch (const json::exception& e) {
        throw config_error(path, e.what());
    } catch (const std::invalid_argument& e) {
        throw config_error(path, e.what());
    }
    throw config_error(path + ".kind", "unknown kind '" + kind + "'");
}

/// The LDM the transform machinery runs on, derived from model + f (or given
/// directly as {"kind":"pqd"|"example8", ...}). Mismatched model/f pairs have
/// degenerate LDMs (0 or a non-admissible step) and are rejected.
inline perpetua::LdmFunction derive_ldm(const json& config) {
    if (config.contains("ldm")) {
        const json& j = config.at("ldm");
        const std::string kind = require_string(j.at("kind"), "ldm.kind");
        if (kind == "pqd")
            return perpetua::pqd_ldm(require_number(j.at("gamma"), "ldm.gamma"),
                                     require_number(j.at("a_plus"), "ldm.a_plus"),
                                     require_number(j.at("rho"), "ldm.rho"));
        if (kind == "example8") {
            const double rho = require_number(j.at("rho"), "ldm.rho");
            return perpetua::curve_ldm(perpetua::make_example8_curve(
                parse_alpha(j.at("alpha"), "ldm.alpha", rho), rho));
        }
        throw config_error("ldm.kind", "unknown kind '" + kind + "'");
    }
    if (!config.contains("model") || !config.contains("f"))
        throw config_error("ldm", "need either an ldm descriptor or model + f");
    const perpetua::RegVarFn f = parse_regvar(config.at("f"), "f");
    const json& jm = config.at("model");
    const std::string kind = require_string(jm.at("kind"), "model.kind");
    if (kind == "atom_survival") {
        const double rho = require_number(jm.at("rho"), "model.rho");
        if (f.rho() != rho || f.scale() != 1.0 || f.log_exponent() != 0.0)
            throw mismatch_error(
                "atom_survival LDM needs f(t) = t^rho with the model's rho");
        return perpetua::curve_ldm(perpetua::make_example8_curve(
            parse_alpha(jm.at("alpha"), "model.alpha", rho), rho));
    }
    // independent: gamma = lim (t/sigma)^rho_b / f(t), finite nonzero only for
    // a matching pure power scale function
    const perpetua::PairModel model = parse_model(jm);
    const auto& params = model.independent_params();
    const auto* wb = std::get_if<perpetua::WeibullB>(&params.B);
    if (wb == nullptr)
        throw mismatch_error("constant-B models have a bounded tail: the LDM is a "
                             "non-admissible step function");
    if (wb->rho_b != f.rho() || f.log_exponent() != 0.0)
        throw mismatch_error("independent LDM needs f of index rho_b with no log factor");
    const double gamma = std::pow(wb->sigma, -wb->rho_b) / f.scale();
    if (model.a_plus() <= 0.0)
        throw mismatch_error("degenerate A == 0: the LDM is constant gamma; the "
                             "transform adds nothing over the B tail");
    return perpetua::pqd_ldm(gamma, model.a_plus(), f.rho());
}

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * SHA256_DIGEST_LENGTH);
    for (unsigned char c : digest) {
        out.push_back(hex[c >> 4]);
        out.push_back(hex[c & 0xF]);
    }
    return out;
}

/// nlohmann objects iterate in sorted key order, so dump() is canonical.
inline std::string config_sha(const json& resolved) { return sha256_hex(resolved.dump()); }

}  // namespace perpetua_cli

#include "latshell/config.hpp"

#include "latshell/errors.hpp"

namespace latshell {

namespace {

int require_int(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number_integer())
        throw ConfigError(std::string("missing or non-integer field '") + field + "'");
    return j[field].get<int>();
}

} // namespace

ConvexBody body_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("body descriptor needs a string field 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "ball") return ConvexBody::euclidean_ball(require_int(j, "dim"));
    if (kind == "pball") return ConvexBody::pball(require_int(j, "p"), require_int(j, "dim"));
    if (kind == "ellipsoid") {
        if (!j.contains("A") || !j["A"].is_array())
            throw ConfigError("ellipsoid descriptor needs a matrix field 'A'");
        std::vector<std::vector<std::int64_t>> A;
        for (const auto& row : j["A"]) {
            if (!row.is_array()) throw ConfigError("field 'A' must be a matrix of integers");
            std::vector<std::int64_t> r;
            for (const auto& v : row) {
                if (!v.is_number_integer())
                    throw ConfigError("field 'A' must be a matrix of integers");
                r.push_back(v.get<std::int64_t>());
            }
            A.push_back(std::move(r));
        }
        try {
            return ConvexBody::ellipsoid(std::move(A));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("field 'A': ") + e.what());
        }
    }
    throw ConfigError("unknown body kind '" + kind + "'");
}

nlohmann::json body_to_json(const ConvexBody& body) {
    nlohmann::json j;
    switch (body.kind()) {
    case BodyKind::euclidean_ball:
        j["kind"] = "ball";
        j["dim"] = body.dimension();
        break;
    case BodyKind::pball:
        j["kind"] = "pball";
        j["p"] = body.pexp();
        j["dim"] = body.dimension();
        break;
    case BodyKind::ellipsoid:
        j["kind"] = "ellipsoid";
        j["A"] = body.matrix();
        break;
    }
    return j;
}

PhaseFunction phase_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("phase descriptor needs a string field 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "parabolic") return PhaseFunction::parabolic(require_int(j, "dim"));
    if (kind == "diff_gauge") {
        if (!j.contains("body"))
            throw ConfigError("diff_gauge descriptor needs a field 'body'");
        return PhaseFunction::difference_gauge(body_from_json(j["body"]));
    }
    throw ConfigError("unknown phase kind '" + kind + "'");
}

nlohmann::json phase_to_json(const PhaseFunction& phi) {
    nlohmann::json j;
    if (phi.kind() == PhaseKind::parabolic) {
        j["kind"] = "parabolic";
        j["dim"] = phi.dimension();
    } else {
        j["kind"] = "diff_gauge";
        j["body"] = body_to_json(phi.body());
    }
    return j;
}

} // namespace latshell

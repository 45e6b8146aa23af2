#include "wattline/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "wattline/errors.hpp"

namespace wattline {

namespace {

using nlohmann::json;

std::string fmt_e(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\t':
            out += "\\t";
            break;
        case '\r':
            out += "\\r";
            break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

const char* unit_for(CeilingKind k) {
    return k == CeilingKind::compute ? "flop_per_s" : "byte_per_s";
}

json parse_json(std::string_view text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw FormatError(std::string(what) + ": not valid JSON");
    }
    return j;
}

void check_keys(const json& obj, std::initializer_list<const char*> known,
                const std::string& path, bool lenient) {
    if (lenient) {
        return;
    }
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw FormatError("unknown key '" + path + key + "'");
        }
    }
}

const json& need(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw FormatError("missing key '" + path + key + "'");
    }
    return *it;
}

std::string need_string(const json& obj, const char* key, const std::string& path) {
    const json& v = need(obj, key, path);
    if (!v.is_string()) {
        throw FormatError("'" + path + key + "' must be a string");
    }
    return v.get<std::string>();
}

double need_number(const json& obj, const char* key, const std::string& path) {
    const json& v = need(obj, key, path);
    if (!v.is_number()) {
        throw FormatError("'" + path + key + "' must be a number");
    }
    return v.get<double>();
}

} // namespace

std::string model_to_json(const RooflineModel& model) {
    std::string out;
    out += "{\n";
    out += "  \"schema\": \"" + std::string(kModelSchema) + "\",\n";
    out += "  \"platform\": \"" + escape(model.platform()) + "\",\n";
    out += "  \"p_peak_w\": " + fmt_e(model.p_peak_w()) + ",\n";
    out += "  \"kind\": \"" + std::string(to_string(model.kind())) + "\",\n";
    out += "  \"precision\": \"" + std::string(to_string(model.precision())) + "\",\n";
    out += "  \"ceilings\": [\n";
    const auto& cs = model.ceilings();
    for (size_t i = 0; i < cs.size(); ++i) {
        out += "    {\"name\": \"" + escape(cs[i].name) + "\", \"rate\": " +
               fmt_e(cs[i].rate) + ", \"unit\": \"" + unit_for(cs[i].kind) + "\"}";
        out += i + 1 < cs.size() ? ",\n" : "\n";
    }
    out += "  ]\n";
    out += "}\n";
    return out;
}

void save_model(const RooflineModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << model_to_json(model);
    out.flush();
    if (!out) {
        throw Error("failed writing model to '" + path + "'");
    }
}

RooflineModel model_from_json_text(std::string_view text, bool lenient) {
    json j = parse_json(text, "model document");
    if (!j.is_object()) {
        throw FormatError("model document: top level must be an object");
    }
    check_keys(j, {"schema", "platform", "p_peak_w", "kind", "precision", "ceilings"},
               "", lenient);
    std::string schema = need_string(j, "schema", "");
    if (schema != kModelSchema) {
        throw FormatError("model document: schema '" + schema + "', want '" +
                          std::string(kModelSchema) + "'");
    }
    std::string platform = need_string(j, "platform", "");
    double p_peak = need_number(j, "p_peak_w", "");
    CeilingKind kind = ceiling_kind_from_string(need_string(j, "kind", ""));
    Precision precision = precision_from_string(need_string(j, "precision", ""));

    const json& cj = need(j, "ceilings", "");
    if (!cj.is_array()) {
        throw FormatError("'ceilings' must be an array");
    }
    std::vector<Ceiling> ceilings;
    ceilings.reserve(cj.size());
    for (size_t i = 0; i < cj.size(); ++i) {
        std::string path = "ceilings[" + std::to_string(i) + "].";
        const json& e = cj[i];
        if (!e.is_object()) {
            throw FormatError("'ceilings[" + std::to_string(i) + "]' must be an object");
        }
        check_keys(e, {"name", "rate", "unit"}, path, lenient);
        Ceiling c;
        c.name = need_string(e, "name", path);
        c.rate = need_number(e, "rate", path);
        c.kind = kind;
        c.precision = precision;
        std::string unit = need_string(e, "unit", path);
        if (unit != unit_for(kind)) {
            throw FormatError("'" + path + "unit' is '" + unit + "' but model kind '" +
                              std::string(to_string(kind)) + "' requires '" +
                              unit_for(kind) + "'");
        }
        ceilings.push_back(std::move(c));
    }
    return RooflineModel::create(std::move(platform), p_peak, kind, precision,
                                 std::move(ceilings));
}

RooflineModel load_model(const std::string& path, bool lenient) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open model '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json_text(buf.str(), lenient);
}

PlatformSpec platform_from_json_text(std::string_view text, bool lenient) {
    json j = parse_json(text, "platform document");
    if (!j.is_object()) {
        throw FormatError("platform document: top level must be an object");
    }
    check_keys(j, {"name", "p_peak_w", "notes"}, "", lenient);
    PlatformSpec p;
    p.name = need_string(j, "name", "");
    p.p_peak_w = need_number(j, "p_peak_w", "");
    if (auto it = j.find("notes"); it != j.end()) {
        if (!it->is_string()) {
            throw FormatError("'notes' must be a string");
        }
        p.notes = it->get<std::string>();
    }
    if (!(p.p_peak_w > 0.0)) {
        throw FormatError("platform document: p_peak_w must be > 0");
    }
    return p;
}

PlatformSpec load_platform(const std::string& path, bool lenient) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open platform file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return platform_from_json_text(buf.str(), lenient);
}

} // namespace wattline

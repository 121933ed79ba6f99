#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

namespace dini {

/// Shortest decimal rendering that parses back to the identical double.
inline std::string round_trip(double v) {
    if (v == 0.0) v = 0.0;  // fold away negative zero
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// Ordered key/value accumulator rendered either as aligned text or as JSON.
/// Every command builds one of these, so stdout and --json never drift apart.
struct Report {
    struct Entry {
        std::string key;
        std::string text;
        double num = 0.0;
        bool is_number = false;
    };
    struct Section {
        std::string title;
        std::vector<Entry> entries;
        std::vector<std::string> notes;

        Section& put(const std::string& key, double v) {
            entries.push_back({key, round_trip(v), v, true});
            return *this;
        }
        Section& put(const std::string& key, const std::string& v) {
            entries.push_back({key, v, 0.0, false});
            return *this;
        }
        Section& note(const std::string& line) {
            notes.push_back(line);
            return *this;
        }
    };

    std::string command;
    std::vector<Section> sections;

    Section& add(const std::string& title) {
        sections.push_back(Section{title, {}, {}});
        return sections.back();
    }

    std::string text() const {
        std::string out;
        out += "== " + command + " ==\n";
        for (const Section& s : sections) {
            out += "\n[" + s.title + "]\n";
            std::size_t width = 0;
            for (const Entry& e : s.entries) width = std::max(width, e.key.size());
            for (const Entry& e : s.entries) {
                out += "  " + e.key;
                out.append(width - e.key.size(), ' ');
                out += " = " + e.text + "\n";
            }
            for (const std::string& n : s.notes) out += "  # " + n + "\n";
        }
        return out;
    }

    std::string json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["sections"] = nlohmann::ordered_json::array();
        for (const Section& s : sections) {
            nlohmann::ordered_json js;
            js["title"] = s.title;
            js["entries"] = nlohmann::ordered_json::object();
            for (const Entry& e : s.entries) {
                if (e.is_number)
                    js["entries"][e.key] = e.num;
                else
                    js["entries"][e.key] = e.text;
            }
            if (!s.notes.empty()) js["notes"] = s.notes;
            j["sections"].push_back(std::move(js));
        }
        return j.dump(2) + "\n";
    }
};

}  // namespace dini

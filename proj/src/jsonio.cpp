#include "sohkan/jsonio.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sohkan {

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string json_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size() + 8);
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
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

void JsonWriter::comma() {
    if (need_comma_) out_ += ",";
    out_ += "\n";
    need_comma_ = false;
}

void JsonWriter::indent() {
    for (int i = 0; i < depth_; ++i) out_ += "  ";
}

void JsonWriter::key_prefix(const std::string& key) {
    comma();
    indent();
    out_ += '"';
    out_ += json_escape(key);
    out_ += "\": ";
}

void JsonWriter::begin_object() {
    if (!out_.empty()) comma(), indent();
    out_ += "{";
    ++depth_;
    need_comma_ = false;
}

void JsonWriter::begin_object(const std::string& key) {
    key_prefix(key);
    out_ += "{";
    ++depth_;
    need_comma_ = false;
}

void JsonWriter::end_object() {
    --depth_;
    out_ += "\n";
    indent();
    out_ += "}";
    need_comma_ = true;
}

void JsonWriter::begin_array(const std::string& key) {
    key_prefix(key);
    out_ += "[";
    ++depth_;
    need_comma_ = false;
}

void JsonWriter::end_array() {
    --depth_;
    out_ += "\n";
    indent();
    out_ += "]";
    need_comma_ = true;
}

void JsonWriter::field(const std::string& key, double value) {
    key_prefix(key);
    out_ += format_g17(value);
    need_comma_ = true;
}

void JsonWriter::field(const std::string& key, int value) {
    key_prefix(key);
    out_ += std::to_string(value);
    need_comma_ = true;
}

void JsonWriter::field(const std::string& key, long long value) {
    key_prefix(key);
    out_ += std::to_string(value);
    need_comma_ = true;
}

void JsonWriter::field(const std::string& key, unsigned long long value) {
    key_prefix(key);
    out_ += std::to_string(value);
    need_comma_ = true;
}

void JsonWriter::field(const std::string& key, bool value) {
    key_prefix(key);
    out_ += value ? "true" : "false";
    need_comma_ = true;
}

void JsonWriter::field(const std::string& key, const std::string& value) {
    key_prefix(key);
    out_ += '"';
    out_ += json_escape(value);
    out_ += '"';
    need_comma_ = true;
}

void JsonWriter::field(const std::string& key, const std::vector<double>& values) {
    key_prefix(key);
    out_ += "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out_ += ", ";
        out_ += format_g17(values[i]);
    }
    out_ += "]";
    need_comma_ = true;
}

void JsonWriter::array_element(double value) {
    comma();
    indent();
    out_ += format_g17(value);
    need_comma_ = true;
}

void JsonWriter::array_element(const std::string& value) {
    comma();
    indent();
    out_ += '"';
    out_ += json_escape(value);
    out_ += '"';
    need_comma_ = true;
}

void JsonWriter::write_file(const std::string& path) const {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file << out_ << "\n";
    if (!file) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace sohkan

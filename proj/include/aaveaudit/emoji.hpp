#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>

#include "error.hpp"
#include "util/io.hpp"
#include "util/text.hpp"

namespace aave {

/// Code point -> textual descriptor (e.g. U+1F602 -> ":face_with_tears_of_joy:").
/// Loaded from the bundled TSV so cleaning output does not depend on a
/// platform Unicode database.
class EmojiTable {
public:
    EmojiTable() = default;

    static EmojiTable load(const std::filesystem::path& path) {
        EmojiTable table;
        table.version_ = "unversioned";
        std::size_t lineno = 0;
        for (const auto& line : io::read_lines(path)) {
            ++lineno;
            if (line.empty()) continue;
            if (line.front() == '#') {
                if (lineno == 1) table.version_ = std::string(text::trim(line.substr(1)));
                continue;
            }
            const auto cols = text::split(line, '\t');
            if (cols.size() != 2 || cols[1].empty())
                throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected <hex>\\t<descriptor>");
            char32_t cp = 0;
            try {
                cp = static_cast<char32_t>(std::stoul(cols[0], nullptr, 16));
            } catch (const std::exception&) {
                throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": bad code point '" + cols[0] + "'");
            }
            for (char c : cols[1])
                if (text::is_space(c))
                    throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": descriptor contains whitespace");
            table.names_[cp] = cols[1];
        }
        return table;
    }

    void add(char32_t cp, std::string descriptor) { names_[cp] = std::move(descriptor); }

    const std::string* find(char32_t cp) const {
        const auto it = names_.find(cp);
        return it == names_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return names_.size(); }
    const std::string& version() const { return version_; }

    /// Joiners and presentation selectors carry no meaning once descriptors are spelled out.
    static bool is_invisible_joiner(char32_t cp) {
        return cp == 0x200D || cp == 0xFE0F || cp == 0xFE0E;
    }

private:
    std::unordered_map<char32_t, std::string> names_;
    std::string version_ = "empty";
};

} // namespace aave

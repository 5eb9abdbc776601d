#include "revkit/diff_align.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_map>

namespace revkit {

namespace {

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;  // UTF-8 continuation/lead bytes
}

bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

std::vector<int> token_ids(std::string_view text, const std::vector<Token>& toks,
                           std::unordered_map<std::string_view, int>& interner) {
    std::vector<int> ids;
    ids.reserve(toks.size());
    for (const Token& t : toks) {
        std::string_view s = text.substr(t.begin, t.end - t.begin);
        auto [it, inserted] = interner.emplace(s, static_cast<int>(interner.size()));
        ids.push_back(it->second);
    }
    return ids;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space_byte(c)) {
            ++i;
            continue;
        }
        std::size_t begin = i;
        if (is_word_byte(c)) {
            while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
        } else {
            ++i;  // punctuation: one byte per token
        }
        out.push_back({begin, i});
    }
    return out;
}

std::vector<std::string> token_strings(std::string_view text) {
    std::vector<std::string> out;
    for (const Token& t : tokenize(text)) out.emplace_back(text.substr(t.begin, t.end - t.begin));
    return out;
}

std::vector<std::pair<int, int>> lcs_match_pairs(const std::vector<int>& a,
                                                 const std::vector<int>& b) {
    int n = static_cast<int>(a.size());
    int m = static_cast<int>(b.size());

    // trim common prefix and suffix
    int pre = 0;
    while (pre < n && pre < m && a[pre] == b[pre]) ++pre;
    int suf = 0;
    while (suf < n - pre && suf < m - pre && a[n - 1 - suf] == b[m - 1 - suf]) ++suf;

    std::vector<std::pair<int, int>> matches;
    for (int i = 0; i < pre; ++i) matches.emplace_back(i, i);

    const int nn = n - pre - suf;
    const int mm = m - pre - suf;
    if (nn > 0 && mm > 0) {
        // Myers O(ND) with snapshot trace for backtracking.
        const int maxd = nn + mm;
        std::vector<int> v(2 * maxd + 1, 0);
        std::vector<std::vector<int>> trace;
        int d_final = -1;
        for (int d = 0; d <= maxd && d_final < 0; ++d) {
            trace.push_back(v);
            for (int k = -d; k <= d; k += 2) {
                int x;
                if (k == -d || (k != d && v[maxd + k - 1] < v[maxd + k + 1]))
                    x = v[maxd + k + 1];
                else
                    x = v[maxd + k - 1] + 1;
                int y = x - k;
                while (x < nn && y < mm && a[pre + x] == b[pre + y]) {
                    ++x;
                    ++y;
                }
                v[maxd + k] = x;
                if (x >= nn && y >= mm) {
                    d_final = d;
                    break;
                }
            }
        }
        std::vector<std::pair<int, int>> mid;
        int x = nn, y = mm;
        for (int d = d_final; d > 0; --d) {
            const std::vector<int>& pv = trace[d];
            int k = x - y;
            int prev_k;
            if (k == -d || (k != d && pv[maxd + k - 1] < pv[maxd + k + 1]))
                prev_k = k + 1;
            else
                prev_k = k - 1;
            int prev_x = pv[maxd + prev_k];
            int prev_y = prev_x - prev_k;
            int x_start = (prev_k == k + 1) ? prev_x : prev_x + 1;
            while (x > x_start && y > x_start - k) {
                mid.emplace_back(x - 1, y - 1);
                --x;
                --y;
            }
            x = prev_x;
            y = prev_y;
        }
        while (x > 0 && y > 0) {
            mid.emplace_back(x - 1, y - 1);
            --x;
            --y;
        }
        for (auto it = mid.rbegin(); it != mid.rend(); ++it)
            matches.emplace_back(pre + it->first, pre + it->second);
    }

    for (int i = 0; i < suf; ++i) matches.emplace_back(n - suf + i, m - suf + i);
    return matches;
}

std::vector<TokenEdit> diff_tokens(std::string_view src, std::string_view tgt) {
    const std::vector<Token> ts = tokenize(src);
    const std::vector<Token> tt = tokenize(tgt);
    std::unordered_map<std::string_view, int> interner;
    const std::vector<int> ids_s = token_ids(src, ts, interner);
    const std::vector<int> ids_t = token_ids(tgt, tt, interner);
    const auto matches = lcs_match_pairs(ids_s, ids_t);

    std::vector<TokenEdit> script;
    std::size_t i = 0, j = 0;  // next unconsumed token index
    auto emit_gap = [&](std::size_t i_end, std::size_t j_end) {
        if (i == i_end && j == j_end) return;
        TokenEdit e;
        if (i < i_end && j < j_end)
            e.op = EditOp::Modify;
        else if (i < i_end)
            e.op = EditOp::Delete;
        else
            e.op = EditOp::Insert;
        if (i < i_end)
            e.src = {ts[i].begin, ts[i_end - 1].end};
        else {
            std::size_t anchor = i < ts.size() ? ts[i].begin : src.size();
            e.src = {anchor, anchor};
        }
        if (j < j_end)
            e.tgt = {tt[j].begin, tt[j_end - 1].end};
        else {
            std::size_t anchor = j < tt.size() ? tt[j].begin : tgt.size();
            e.tgt = {anchor, anchor};
        }
        script.push_back(e);
    };
    for (const auto& [mi, mj] : matches) {
        emit_gap(static_cast<std::size_t>(mi), static_cast<std::size_t>(mj));
        i = static_cast<std::size_t>(mi) + 1;
        j = static_cast<std::size_t>(mj) + 1;
    }
    emit_gap(ts.size(), tt.size());
    return script;
}

std::vector<CharRange> segment_paragraphs(const std::string& document) {
    std::vector<CharRange> out;
    std::size_t i = 0;
    const std::size_t n = document.size();
    while (i < n) {
        while (i < n && is_space_byte(static_cast<unsigned char>(document[i]))) ++i;
        if (i >= n) break;
        std::size_t begin = i;
        // advance until a blank line (two newlines with only spaces between)
        std::size_t end = n;
        std::size_t j = i;
        while (j < n) {
            if (document[j] == '\n') {
                std::size_t k = j + 1;
                while (k < n && (document[k] == ' ' || document[k] == '\t' || document[k] == '\r')) ++k;
                if (k < n && document[k] == '\n') {
                    end = j;
                    break;
                }
            }
            ++j;
        }
        if (j >= n) end = n;
        // trim trailing whitespace
        while (end > begin && is_space_byte(static_cast<unsigned char>(document[end - 1]))) --end;
        if (end > begin) out.push_back({begin, end});
        i = std::max(end, j) + 1;
    }
    return out;
}

namespace {

const std::set<std::string>& abbreviations() {
    static const std::set<std::string> abbr = {
        "mr",   "mrs",  "ms",   "dr",   "prof", "sr",   "jr",  "st",  "vs",  "etc",
        "fig",  "figs", "eq",   "eqs",  "no",   "nos",  "vol", "pp",  "al",  "inc",
        "ltd",  "co",   "corp", "dept", "univ", "approx", "est", "jan", "feb", "mar",
        "apr",  "jun",  "jul",  "aug",  "sep",  "sept", "oct", "nov", "dec", "resp"};
    return abbr;
}

// word (letters only) immediately preceding position `i` in [begin, i)
std::string preceding_word(const std::string& text, std::size_t begin, std::size_t i) {
    std::size_t e = i;
    std::size_t b = e;
    while (b > begin && std::isalpha(static_cast<unsigned char>(text[b - 1]))) --b;
    std::string w = text.substr(b, e - b);
    for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return w;
}

bool plausible_sentence_start(const std::string& text, std::size_t i) {
    if (i >= text.size()) return true;
    unsigned char c = static_cast<unsigned char>(text[i]);
    return std::isupper(c) || std::isdigit(c) || c == '"' || c == '\'' || c == '(' ||
           c == '[' || c >= 0x80;
}

}  // namespace

std::vector<SentenceSpan> segment_sentences(const std::string& document) {
    std::vector<SentenceSpan> out;
    const auto paragraphs = segment_paragraphs(document);
    for (std::size_t p = 0; p < paragraphs.size(); ++p) {
        const CharRange para = paragraphs[p];
        std::size_t start = para.begin;
        std::size_t i = para.begin;
        auto flush = [&](std::size_t end) {
            while (start < end && is_space_byte(static_cast<unsigned char>(document[start]))) ++start;
            std::size_t e = end;
            while (e > start && is_space_byte(static_cast<unsigned char>(document[e - 1]))) --e;
            if (e > start)
                out.push_back({document.substr(start, e - start), {start, e}, static_cast<int>(p)});
            start = end;
        };
        while (i < para.end) {
            char c = document[i];
            if (c == '.' || c == '!' || c == '?') {
                bool boundary = true;
                if (c == '.') {
                    // decimal numbers and abbreviations do not end a sentence
                    bool digit_before = i > para.begin &&
                                        std::isdigit(static_cast<unsigned char>(document[i - 1]));
                    bool digit_after = i + 1 < para.end &&
                                       std::isdigit(static_cast<unsigned char>(document[i + 1]));
                    if (digit_before && digit_after) boundary = false;
                    if (boundary) {
                        std::string w = preceding_word(document, para.begin, i);
                        if (abbreviations().count(w)) boundary = false;
                        if (w.size() == 1 && std::islower(static_cast<unsigned char>(w[0])))
                            boundary = false;  // i.e., e.g. pieces
                    }
                }
                if (boundary) {
                    // absorb trailing punctuation runs and closing quotes/brackets
                    std::size_t j = i + 1;
                    while (j < para.end &&
                           (document[j] == '.' || document[j] == '!' || document[j] == '?' ||
                            document[j] == '"' || document[j] == '\'' || document[j] == ')' ||
                            document[j] == ']'))
                        ++j;
                    if (j >= para.end) {
                        flush(j);
                        i = j;
                        continue;
                    }
                    if (is_space_byte(static_cast<unsigned char>(document[j]))) {
                        std::size_t k = j;
                        while (k < para.end && is_space_byte(static_cast<unsigned char>(document[k])))
                            ++k;
                        if (plausible_sentence_start(document, k)) {
                            flush(j);
                            i = k;
                            continue;
                        }
                    }
                }
            }
            ++i;
        }
        flush(para.end);
    }
    return out;
}

double sentence_similarity(std::string_view a, std::string_view b) {
    std::unordered_map<std::string_view, int> interner;
    const auto ta = tokenize(a);
    const auto tb = tokenize(b);
    const auto ids_a = token_ids(a, ta, interner);
    const auto ids_b = token_ids(b, tb, interner);
    if (ids_a.empty() && ids_b.empty()) return 1.0;
    if (ids_a.empty() || ids_b.empty()) return 0.0;
    const std::size_t lcs = lcs_match_pairs(ids_a, ids_b).size();
    return 2.0 * static_cast<double>(lcs) /
           static_cast<double>(ids_a.size() + ids_b.size());
}

std::vector<AlignmentPair> align_sentences(const std::vector<SentenceSpan>& src,
                                           const std::vector<SentenceSpan>& tgt,
                                           double threshold) {
    const int n = static_cast<int>(src.size());
    const int m = static_cast<int>(tgt.size());
    std::vector<std::vector<double>> sim(n, std::vector<double>(m, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) sim[i][j] = sentence_similarity(src[i].text, tgt[j].text);

    // monotone DP; 0 = diag, 1 = skip src, 2 = skip tgt
    std::vector<std::vector<double>> score(n + 1, std::vector<double>(m + 1, 0.0));
    std::vector<std::vector<int>> move(n + 1, std::vector<int>(m + 1, 0));
    for (int i = 1; i <= n; ++i) move[i][0] = 1;
    for (int j = 1; j <= m; ++j) move[0][j] = 2;
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= m; ++j) {
            double diag = score[i - 1][j - 1] + sim[i - 1][j - 1];
            double up = score[i - 1][j];
            double left = score[i][j - 1];
            score[i][j] = diag;
            move[i][j] = 0;
            if (up > score[i][j]) {
                score[i][j] = up;
                move[i][j] = 1;
            }
            if (left > score[i][j]) {
                score[i][j] = left;
                move[i][j] = 2;
            }
        }
    }
    std::vector<AlignmentPair> rev;
    int i = n, j = m;
    while (i > 0 || j > 0) {
        int mv = move[i][j];
        if (mv == 0) {
            AlignmentPair p;
            p.src_index = i - 1;
            p.tgt_index = j - 1;
            if (sim[i - 1][j - 1] < threshold) {
                // too dissimilar to pair up: independent delete + insert
                rev.push_back({std::nullopt, j - 1, AlignKind::Inserted});
                rev.push_back({i - 1, std::nullopt, AlignKind::Deleted});
            } else {
                p.kind = src[i - 1].text == tgt[j - 1].text ? AlignKind::Matched
                                                            : AlignKind::Modified;
                rev.push_back(p);
            }
            --i;
            --j;
        } else if (mv == 1) {
            rev.push_back({i - 1, std::nullopt, AlignKind::Deleted});
            --i;
        } else {
            rev.push_back({std::nullopt, j - 1, AlignKind::Inserted});
            --j;
        }
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
}

namespace {

// Does `range` fully contain at least one span from `spans`?
bool contains_full_span(const CharRange& range, const std::vector<CharRange>& spans) {
    for (const CharRange& s : spans)
        if (s.begin >= range.begin && s.end <= range.end && !s.empty()) return true;
    return false;
}

// Index of the unique span intersecting `range`, or nullopt when the range
// intersects zero or multiple spans. Empty ranges use their anchor point.
std::optional<int> unique_containing_span(const CharRange& range,
                                          const std::vector<CharRange>& spans) {
    std::optional<int> found;
    int count = 0;
    for (std::size_t k = 0; k < spans.size(); ++k) {
        const CharRange& s = spans[k];
        bool intersects;
        if (range.empty())
            intersects = range.begin >= s.begin && range.begin <= s.end;
        else
            intersects = range.begin < s.end && s.begin < range.end;
        if (intersects) {
            ++count;
            found = static_cast<int>(k);
        }
    }
    if (count == 1) return found;
    if (count == 0) return std::nullopt;
    return std::nullopt;
}

struct DocLayout {
    std::vector<CharRange> sentences;
    std::vector<int> sentence_paragraphs;
    std::vector<CharRange> paragraphs;
};

DocLayout layout_of(const std::string& text) {
    DocLayout l;
    for (const SentenceSpan& s : segment_sentences(text)) {
        l.sentences.push_back(s.range);
        l.sentence_paragraphs.push_back(s.paragraph_index);
    }
    l.paragraphs = segment_paragraphs(text);
    return l;
}

// Object-size class of one side of an action.
Granularity side_granularity(const CharRange& range, const DocLayout& layout) {
    if (range.empty()) return Granularity::SentenceLevel;
    if (contains_full_span(range, layout.paragraphs)) return Granularity::DocumentLevel;
    if (contains_full_span(range, layout.sentences)) return Granularity::ParagraphLevel;
    // multiple partial sentences touched: treat as a sentence-object edit
    int touched = 0;
    for (const CharRange& s : layout.sentences)
        if (range.begin < s.end && s.begin < range.end) ++touched;
    return touched > 1 ? Granularity::ParagraphLevel : Granularity::SentenceLevel;
}

}  // namespace

Revision extract_revision(const std::string& doc_id, int depth, const std::string& src,
                          const std::string& tgt, Domain domain) {
    if (src == tgt) throw IdenticalTextsError();

    Revision rev;
    rev.doc_id = doc_id;
    rev.depth = depth;
    rev.source_text = src;
    rev.target_text = tgt;
    rev.domain = domain;

    const std::vector<Token> ts = tokenize(src);
    const std::vector<Token> tt = tokenize(tgt);
    std::unordered_map<std::string_view, int> interner;
    const std::vector<int> ids_s = token_ids(src, ts, interner);
    const std::vector<int> ids_t = token_ids(tgt, tt, interner);
    const auto matches = lcs_match_pairs(ids_s, ids_t);

    const DocLayout src_layout = layout_of(src);
    const DocLayout tgt_layout = layout_of(tgt);

    std::size_t prev_s = 0, prev_t = 0;  // char positions after last anchor
    auto emit_region = [&](std::size_t s_end, std::size_t t_end) {
        std::string_view a(src.data() + prev_s, s_end - prev_s);
        std::string_view b(tgt.data() + prev_t, t_end - prev_t);
        if (a == b) return;
        // trim common *whitespace* prefix/suffix so spans cover whole tokens
        std::size_t lead = 0;
        while (lead < a.size() && lead < b.size() && a[lead] == b[lead] &&
               is_space_byte(static_cast<unsigned char>(a[lead])))
            ++lead;
        std::size_t trail = 0;
        while (trail < a.size() - lead && trail < b.size() - lead &&
               a[a.size() - 1 - trail] == b[b.size() - 1 - trail] &&
               is_space_byte(static_cast<unsigned char>(a[a.size() - 1 - trail])))
            ++trail;
        EditAction act;
        act.src_range = {prev_s + lead, s_end - trail};
        act.tgt_range = {prev_t + lead, t_end - trail};
        act.original_span = src.substr(act.src_range.begin, act.src_range.size());
        act.revised_span = tgt.substr(act.tgt_range.begin, act.tgt_range.size());
        if (act.original_span.empty())
            act.op = EditOp::Insert;
        else if (act.revised_span.empty())
            act.op = EditOp::Delete;
        else
            act.op = EditOp::Modify;

        Granularity g_src = side_granularity(act.src_range, src_layout);
        Granularity g_tgt = side_granularity(act.tgt_range, tgt_layout);
        act.granularity = std::max(g_src, g_tgt);

        const auto& idx_layout = act.op == EditOp::Insert ? tgt_layout : src_layout;
        const CharRange& idx_range = act.op == EditOp::Insert ? act.tgt_range : act.src_range;
        if (auto si = unique_containing_span(idx_range, idx_layout.sentences)) {
            act.sentence_index = *si;
            act.paragraph_index = idx_layout.sentence_paragraphs[static_cast<std::size_t>(*si)];
        } else if (auto pi = unique_containing_span(idx_range, idx_layout.paragraphs)) {
            act.paragraph_index = *pi;
        }
        rev.actions.push_back(std::move(act));
    };

    for (const auto& [mi, mj] : matches) {
        emit_region(ts[static_cast<std::size_t>(mi)].begin, tt[static_cast<std::size_t>(mj)].begin);
        prev_s = ts[static_cast<std::size_t>(mi)].end;
        prev_t = tt[static_cast<std::size_t>(mj)].end;
    }
    emit_region(src.size(), tgt.size());
    return rev;
}

std::string apply_edits(const std::string& src, const std::vector<EditAction>& actions) {
    std::string out;
    out.reserve(src.size());
    std::size_t pos = 0;
    for (const EditAction& a : actions) {
        if (a.src_range.begin < pos || a.src_range.end > src.size() ||
            a.src_range.begin > a.src_range.end)
            throw InconsistentOffsetsError("action range out of order or out of bounds");
        if (src.compare(a.src_range.begin, a.src_range.size(), a.original_span) != 0)
            throw InconsistentOffsetsError("original span does not match source at [" +
                                           std::to_string(a.src_range.begin) + ", " +
                                           std::to_string(a.src_range.end) + ")");
        out.append(src, pos, a.src_range.begin - pos);
        out += a.revised_span;
        pos = a.src_range.end;
    }
    out.append(src, pos, src.size() - pos);
    return out;
}

}  // namespace revkit

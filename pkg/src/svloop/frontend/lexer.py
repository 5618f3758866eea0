"""Tokenizer for the SystemVerilog subset."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError, UnsupportedConstruct

KEYWORDS = {
    "module", "endmodule", "input", "output", "wire", "reg", "logic",
    "assign", "always", "begin", "end", "if", "else", "case", "endcase",
    "default", "posedge", "negedge", "parameter", "localparam", "or",
}

# Constructs we recognize well enough to reject by name.
UNSUPPORTED_KEYWORDS = {
    "inout", "initial", "function", "endfunction", "task", "endtask",
    "generate", "endgenerate", "genvar", "for", "while", "repeat",
    "forever", "integer", "signed", "casez", "casex", "assert",
    "interface", "typedef", "enum", "struct", "package", "import",
    "always_ff", "always_comb", "always_latch", "wait", "fork", "join",
    "real", "time", "event", "specify", "primitive", "defparam",
}

TWO_CHAR_OPS = {"<=", ">=", "==", "!=", "<<", ">>", "&&", "||"}
ONE_CHAR_OPS = set("~&|^+-<>!?:()[]{};,=@*#.")


@dataclass
class Token:
    kind: str      # ident | keyword | number | based | op | eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def error(msg):
        raise ParseError(msg, line, col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            if j < 0:
                break
            col += j - i
            i = j
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                error("unterminated block comment")
            skipped = text[i:j + 2]
            nl = skipped.count("\n")
            if nl:
                line += nl
                col = len(skipped) - skipped.rfind("\n")
            else:
                col += len(skipped)
            i = j + 2
            continue

        start_line, start_col = line, col

        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_$"):
                j += 1
            word = text[i:j]
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue

        if ch.isdigit() or ch == "'":
            # number, optionally followed by 'b/'d/'h payload
            j = i
            while j < n and (text[j].isdigit() or text[j] == "_"):
                j += 1
            if j < n and text[j] == "'":
                k = j + 1
                if k < n and text[k] in "sS":
                    raise UnsupportedConstruct("signed literal", start_line, start_col)
                if k >= n or text[k] not in "bBdDhH":
                    error("malformed based literal")
                k += 1
                digits_start = k
                while k < n and (text[k].isalnum() or text[k] == "_"):
                    k += 1
                if k == digits_start:
                    error("based literal missing digits")
                tokens.append(Token("based", text[i:k], start_line, start_col))
                col += k - i
                i = k
                continue
            if j == i:  # bare quote: 'b101 style unsized based literal
                error("malformed literal")
            tokens.append(Token("number", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue

        two = text[i:i + 2]
        if two in TWO_CHAR_OPS:
            tokens.append(Token("op", two, start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in ONE_CHAR_OPS:
            tokens.append(Token("op", ch, start_line, start_col))
            i += 1
            col += 1
            continue

        error(f"unexpected character {ch!r}")

    tokens.append(Token("eof", "", line, col))
    return tokens

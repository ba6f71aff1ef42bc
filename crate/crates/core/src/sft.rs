//! Instruction-tuning data formats for the template and data ablations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenizer::{TokenSequence, Tokenizer};
use crate::vocab::TokenId;

pub const USER_MARKER: &str = "<|user|>";
pub const ASSISTANT_MARKER: &str = "<|assistant|>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SftMode {
    Chat,
    FullGradient,
    QaTemplate,
    NoTemplate,
    RemoveInstruction,
}

impl SftMode {
    pub const ALL: [SftMode; 5] = [
        SftMode::Chat,
        SftMode::FullGradient,
        SftMode::QaTemplate,
        SftMode::NoTemplate,
        SftMode::RemoveInstruction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SftMode::Chat => "chat",
            SftMode::FullGradient => "full_gradient",
            SftMode::QaTemplate => "qa_template",
            SftMode::NoTemplate => "no_template",
            SftMode::RemoveInstruction => "remove_instruction",
        }
    }
}

impl fmt::Display for SftMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SftMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        SftMode::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::invalid(format!("unknown SFT mode {s:?}")))
    }
}

/// One formatted training example. `loss_mask_offset` is the byte offset in
/// `text` where the loss starts; everything before it is masked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftRecord {
    pub instruction: String,
    pub response: String,
    pub mode: SftMode,
    pub text: String,
    pub loss_mask_offset: usize,
}

impl SftRecord {
    /// The masked part of `text`.
    pub fn prompt(&self) -> &str {
        &self.text[..self.loss_mask_offset]
    }

    /// The part of `text` the loss is computed on.
    pub fn target(&self) -> &str {
        &self.text[self.loss_mask_offset..]
    }

    /// Token ids for training: the masked prefix and the remainder are
    /// encoded separately so the mask falls on a token boundary. Returns the
    /// ids and the number of masked tokens.
    pub fn token_ids(&self, tok: &Tokenizer) -> Result<(Vec<TokenId>, usize)> {
        let head = tok.encode_canonical(self.prompt())?;
        let tail = tok.encode_canonical(self.target())?;
        let masked = head.len();
        let mut ids = head.ids().to_vec();
        ids.extend_from_slice(tail.ids());
        Ok((ids, masked))
    }
}

fn chat(instruction: &str, response: &str) -> (String, usize) {
    let prefix = format!("{USER_MARKER}{instruction} {ASSISTANT_MARKER}");
    let offset = prefix.len();
    (prefix + response, offset)
}

/// Format an instruction/response pair. In `RemoveInstruction` mode the
/// instruction is only used for its canonical token count.
pub fn format_sft(
    instruction: &str,
    response: &str,
    mode: SftMode,
    tok: &Tokenizer,
) -> Result<SftRecord> {
    if response.is_empty() {
        return Err(Error::invalid("empty response"));
    }
    if instruction.is_empty() {
        return Err(Error::invalid("empty instruction"));
    }
    let (instruction, response, text, loss_mask_offset) = match mode {
        SftMode::Chat | SftMode::FullGradient => {
            let (text, offset) = chat(instruction, response);
            let offset = if mode == SftMode::FullGradient {
                0
            } else {
                offset
            };
            (instruction.to_string(), response.to_string(), text, offset)
        }
        SftMode::QaTemplate => {
            let prefix = format!("Question: {instruction} Answer:");
            let offset = prefix.len();
            (
                instruction.to_string(),
                response.to_string(),
                format!("{prefix} {response}"),
                offset,
            )
        }
        SftMode::NoTemplate => {
            let offset = instruction.len();
            (
                instruction.to_string(),
                response.to_string(),
                format!("{instruction} {response}"),
                offset,
            )
        }
        SftMode::RemoveInstruction => {
            let n = tok.encode_canonical(instruction)?.len();
            let (head, tail) = split_response(response, n, tok)?;
            let (text, offset) = chat(&head, &tail);
            (head, tail, text, offset)
        }
    };
    Ok(SftRecord {
        instruction,
        response,
        mode,
        text,
        loss_mask_offset,
    })
}

/// Split `response` after its first `n` canonical tokens. A boundary inside
/// a multi-byte character moves forward to the end of that character.
/// Whitespace at the boundary is trimmed from both halves, as is leading
/// whitespace of the new instruction.
pub fn split_response(response: &str, n: usize, tok: &Tokenizer) -> Result<(String, String)> {
    let tokens: TokenSequence = tok.encode_canonical(response)?;
    if tokens.len() <= n {
        return Err(Error::InsufficientTokens {
            needed: n + 1,
            found: tokens.len(),
        });
    }
    let mut cut: usize = tokens.units()[..n].iter().map(Vec::len).sum();
    while !response.is_char_boundary(cut) {
        cut += 1;
    }
    let head = response[..cut].trim();
    let tail = response[cut..].trim_start();
    if head.is_empty() || tail.is_empty() {
        return Err(Error::InsufficientTokens {
            needed: n + 1,
            found: tokens.len(),
        });
    }
    Ok((head.to_string(), tail.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::toy_tokenizer_with_space;

    #[test]
    fn chat_and_full_gradient_share_text() {
        let tok = toy_tokenizer_with_space();
        let chat = format_sft("abc", "cab", SftMode::Chat, &tok).unwrap();
        assert_eq!(chat.text, "<|user|>abc <|assistant|>cab");
        assert_eq!(chat.prompt(), "<|user|>abc <|assistant|>");
        assert_eq!(chat.target(), "cab");
        let full = format_sft("abc", "cab", SftMode::FullGradient, &tok).unwrap();
        assert_eq!(full.text, chat.text);
        assert_eq!(full.loss_mask_offset, 0);
    }

    #[test]
    fn qa_and_plain_templates() {
        let tok = toy_tokenizer_with_space();
        let qa = format_sft("ab", "c", SftMode::QaTemplate, &tok).unwrap();
        assert_eq!(qa.text, "Question: ab Answer: c");
        assert_eq!(qa.prompt(), "Question: ab Answer:");
        let plain = format_sft("ab", "c", SftMode::NoTemplate, &tok).unwrap();
        assert_eq!(plain.text, "ab c");
        assert_eq!(plain.target(), " c");
    }

    #[test]
    fn remove_instruction_counts_tokens() {
        let tok = toy_tokenizer_with_space();
        // "abc" is one token; response " abc abc bc" is [" abc", " abc", " ", "bc"]
        let rec = format_sft("abc", " abc abc bc", SftMode::RemoveInstruction, &tok).unwrap();
        assert_eq!(rec.instruction, "abc");
        assert_eq!(rec.response, "abc bc");
        assert_eq!(rec.text, "<|user|>abc <|assistant|>abc bc");
        // two-token instruction
        let rec = format_sft("abcb", " abc abc bc", SftMode::RemoveInstruction, &tok).unwrap();
        assert_eq!(rec.instruction, "abc abc");
        assert_eq!(rec.response, "bc");
    }

    #[test]
    fn remove_instruction_needs_a_longer_response() {
        let tok = toy_tokenizer_with_space();
        let err = format_sft("abcb", "abc", SftMode::RemoveInstruction, &tok).unwrap_err();
        assert!(matches!(
            err,
            Error::InsufficientTokens {
                needed: 3,
                found: 1
            }
        ));
        assert!(format_sft("abcb", "abcbc", SftMode::RemoveInstruction, &tok).is_err());
    }

    #[test]
    fn empty_inputs_rejected() {
        let tok = toy_tokenizer_with_space();
        assert!(format_sft("", "abc", SftMode::Chat, &tok).is_err());
        assert!(format_sft("abc", "", SftMode::QaTemplate, &tok).is_err());
    }

    #[test]
    fn mode_names_round_trip() {
        for mode in SftMode::ALL {
            assert_eq!(mode.name().parse::<SftMode>().unwrap(), mode);
            assert_eq!(
                serde_json::to_string(&mode).unwrap(),
                format!("\"{}\"", mode.name())
            );
        }
        assert_eq!(
            "qa-template".parse::<SftMode>().unwrap(),
            SftMode::QaTemplate
        );
    }
}

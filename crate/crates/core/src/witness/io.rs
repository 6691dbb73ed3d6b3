use std::io::{self, BufRead, Read, Write};

use serde_json::Value;

use crate::alphabet::{Alphabet, Sym};

use super::Checkpoint;

/// `alphabet=<symbols>;family=<id>;params=<json>;seed=<u64>`
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceHeader {
    pub alphabet: String,
    pub family: String,
    pub params: Value,
    pub seed: u64,
}

impl SequenceHeader {
    pub fn line(&self) -> String {
        format!("alphabet={};family={};params={};seed={}", self.alphabet, self.family, self.params, self.seed)
    }

    pub fn parse(line: &str) -> io::Result<Self> {
        let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, format!("bad sequence header: {m}"));
        let rest = line.strip_prefix("alphabet=").ok_or_else(|| bad("missing alphabet"))?;
        let (alphabet, rest) = rest.split_once(";family=").ok_or_else(|| bad("missing family"))?;
        let (family, rest) = rest.split_once(";params=").ok_or_else(|| bad("missing params"))?;
        let (params, seed) = rest.rsplit_once(";seed=").ok_or_else(|| bad("missing seed"))?;
        Ok(SequenceHeader {
            alphabet: alphabet.to_string(),
            family: family.to_string(),
            params: serde_json::from_str(params).map_err(|_| bad("params are not JSON"))?,
            seed: seed.trim().parse().map_err(|_| bad("seed is not a u64"))?,
        })
    }
}

/// Header line, newline, then one byte per symbol.
pub fn write_sequence<W: Write>(mut w: W, header: &SequenceHeader, alphabet: &Alphabet, symbols: &[Sym]) -> io::Result<()> {
    writeln!(w, "{}", header.line())?;
    let bytes: Vec<u8> = symbols.iter().map(|&s| alphabet.char_of(s) as u8).collect();
    w.write_all(&bytes)?;
    w.flush()
}

pub fn read_sequence<R: BufRead>(mut r: R) -> io::Result<(SequenceHeader, Alphabet, Vec<Sym>)> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header = SequenceHeader::parse(line.trim_end_matches(['\n', '\r']))?;
    let alphabet =
        Alphabet::new(&header.alphabet).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    let symbols = body
        .iter()
        .map(|&b| {
            alphabet
                .index(b as char)
                .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, format!("byte {b:#04x} is not in the alphabet")))
        })
        .collect::<io::Result<Vec<Sym>>>()?;
    Ok((header, alphabet, symbols))
}

pub fn write_checkpoints<W: Write>(w: W, cps: &[Checkpoint]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for c in cps {
        wr.serialize(c)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_checkpoints<R: Read>(r: R) -> csv::Result<Vec<Checkpoint>> {
    csv::Reader::from_reader(r).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::{generate, WitnessSpec};

    #[test]
    fn sequence_file_round_trip() {
        let spec = WitnessSpec::T4 { sigma: 2, k: 3 };
        let w = generate(&spec, 7, 300).unwrap();
        let header = SequenceHeader {
            alphabet: w.alphabet.as_string(),
            family: spec.id().into(),
            params: serde_json::to_value(&spec).unwrap(),
            seed: 7,
        };
        let mut buf = Vec::new();
        write_sequence(&mut buf, &header, &w.alphabet, &w.symbols).unwrap();
        assert!(buf.starts_with(b"alphabet=01;family=t4;params={"));
        let (h, a, s) = read_sequence(&buf[..]).unwrap();
        assert_eq!(h, header);
        assert_eq!(a, w.alphabet);
        assert_eq!(s, w.symbols);

        let mut csv = Vec::new();
        write_checkpoints(&mut csv, &w.checkpoints).unwrap();
        assert!(csv.starts_with(b"position,kind\n0,zone_start\n"));
        assert_eq!(read_checkpoints(&csv[..]).unwrap(), w.checkpoints);
    }
}

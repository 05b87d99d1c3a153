//! One module per subcommand plus shared input plumbing.

pub mod ablate;
pub mod embed;
pub mod eval;
pub mod gen_pretrain;
pub mod index;
pub mod linearize;
pub mod loss;
pub mod mask;
pub mod pipeline;
pub mod search;

use std::path::Path;

use skp_core::ingest::{
    collect_triples, load_cvt_list, open_ntriples, parse_ntriples, CvtPolicy, NameMap,
    ParsePolicy, ParseStats, SurfaceResolver, Triple,
};
use skp_core::tokenize::Tokenizer;
use skp_core::Result;

pub fn parse_dump(path: &Path, policy: ParsePolicy) -> Result<(Vec<Triple>, ParseStats)> {
    collect_triples(parse_ntriples(open_ntriples(path)?), policy)
}

pub fn build_resolver(name_map: Option<&Path>) -> Result<SurfaceResolver> {
    Ok(SurfaceResolver::new(name_map.map(NameMap::from_file).transpose()?))
}

pub fn build_tokenizer(mode: &str, vocab: Option<&Path>) -> Result<Box<dyn Tokenizer>> {
    skp_core::tokenize::create(mode, vocab)
}

pub fn cvt_policy(list: Option<&Path>) -> Result<CvtPolicy> {
    Ok(match list {
        Some(path) => CvtPolicy::ExplicitList(load_cvt_list(path)?),
        None => CvtPolicy::Heuristic,
    })
}

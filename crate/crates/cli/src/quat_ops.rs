use clap::{Args, ValueEnum};
use serde_json::json;

use tracepoly::quatalg::{generator, in_order_o, in_v, in_v0, qconj, qmul, qnorm, rho, rho_inv, Quat};
use tracepoly::wordpoly::{rstw_uv, word_to_quat};
use tracepoly::words::parse_word;

use crate::{failure, usage, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Show,
    Mul,
    Conj,
    Norm,
    Rho,
    RhoInv,
    InV0,
    InV,
    InOrder,
}

#[derive(Debug, Args)]
pub struct QuatArgs {
    op: Op,
    /// `w1`, `w2`, `w3`, a good word, or a quaternion as JSON.
    #[arg(allow_hyphen_values = true)]
    operand: String,
    /// Second factor for `mul`.
    #[arg(allow_hyphen_values = true)]
    other: Option<String>,
    /// Take words in the (u, v) algebra instead of (x, z).
    #[arg(long)]
    uv: bool,
    #[arg(long)]
    json: bool,
}

fn operand(s: &str, uv: bool) -> Result<Quat, CliError> {
    let s = s.trim();
    let q = match s {
        "w1" | "w2" | "w3" => generator(s[1..].parse().expect("digit")),
        _ if s.starts_with('{') => return serde_json::from_str(s).map_err(usage),
        _ => {
            let w = parse_word(s, false).map_err(usage)?;
            return if uv { rstw_uv(&w).map_err(usage) } else { word_to_quat(&w).map_err(usage) };
        }
    };
    if uv {
        rho(&q).map_err(failure)
    } else {
        Ok(q)
    }
}

pub fn run(a: QuatArgs) -> Result<u8, CliError> {
    let q = operand(&a.operand, a.uv)?;
    if a.op != Op::Mul && a.other.is_some() {
        return Err(usage("only mul takes a second operand"));
    }
    let out = match a.op {
        Op::Show => json!(q),
        Op::Mul => {
            let other = a.other.as_deref().ok_or_else(|| usage("mul needs two operands"))?;
            let p = operand(other, a.uv)?;
            json!(qmul(&q, &p).map_err(usage)?)
        }
        Op::Conj => json!(qconj(&q)),
        Op::Norm => json!(qnorm(&q).map_err(usage)?),
        Op::Rho => json!(rho(&q).map_err(usage)?),
        Op::RhoInv => json!(rho_inv(&q).map_err(usage)?),
        Op::InV0 => json!(in_v0(&q)),
        Op::InV => json!(in_v(&q)),
        Op::InOrder => json!(in_order_o(&q)),
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        match a.op {
            Op::Norm => println!("{}", serde_json::from_value::<tracepoly::exactpoly::RatPoly2>(out)?),
            Op::InV0 | Op::InV => println!("{out}"),
            Op::InOrder => {
                let c = in_order_o(&q);
                println!("member {}", c.member);
                if let Some(wit) = &c.witness {
                    println!("integral part {}", wit.ints);
                    println!("P             {}", wit.p.display_with("u", "v"));
                }
            }
            _ => println!("{}", serde_json::from_value::<Quat>(out)?),
        }
    }
    Ok(0)
}

/**
 * Display formatting for the service's exact rational tokens.
 *
 * Tokens are JSON numbers (finite decimals) or "numerator/denominator"
 * strings.  Formatting renders them to two decimals, half-even, using
 * integer arithmetic only.  This is presentation of server-origin values;
 * no payout amount is ever computed here.
 */

import type { RationalToken } from "./api.js";

interface Ratio {
  num: bigint;
  den: bigint;
}

function parseDecimal(text: string): Ratio {
  const match = /^(-?)(\d+)(?:\.(\d+))?(?:[eE]([+-]?\d+))?$/.exec(text);
  if (!match) {
    throw new Error(`not a numeric token: ${text}`);
  }
  const [, sign, whole, fracPart = "", expPart = "0"] = match;
  let num = BigInt(whole + fracPart);
  let den = 10n ** BigInt(fracPart.length);
  const exponent = Number(expPart);
  if (exponent > 0) {
    num *= 10n ** BigInt(exponent);
  } else if (exponent < 0) {
    den *= 10n ** BigInt(-exponent);
  }
  return { num: sign === "-" ? -num : num, den };
}

export function parseRational(token: RationalToken): Ratio {
  if (typeof token === "number") {
    if (!Number.isFinite(token)) {
      throw new Error(`not a finite number: ${token}`);
    }
    return parseDecimal(String(token));
  }
  const slash = token.indexOf("/");
  if (slash >= 0) {
    const num = BigInt(token.slice(0, slash));
    const den = BigInt(token.slice(slash + 1));
    if (den === 0n) {
      throw new Error(`zero denominator: ${token}`);
    }
    return { num, den };
  }
  return parseDecimal(token);
}

/** Render a token as currency with exactly two decimals, rounding half-even. */
export function formatMoney(token: RationalToken): string {
  const { num, den } = parseRational(token);
  const negative = num < 0n;
  const abs = negative ? -num : num;
  const scaled = abs * 100n;
  let cents = scaled / den;
  const remainder = scaled % den;
  const twice = remainder * 2n;
  if (twice > den || (twice === den && cents % 2n === 1n)) {
    cents += 1n;
  }
  const units = cents / 100n;
  const rest = (cents % 100n).toString().padStart(2, "0");
  const body = `${units}.${rest}`;
  return negative && cents !== 0n ? `-${body}` : body;
}

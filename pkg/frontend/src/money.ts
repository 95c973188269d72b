// Money stays in integer minor units end to end; formatting is pure
// integer arithmetic, never float division on currency.

import type { Money } from "./api.js";

export function formatMinor(amountMinor: number, currency: string): string {
  if (!Number.isInteger(amountMinor)) {
    throw new Error(`amount_minor must be an integer, got ${amountMinor}`);
  }
  const sign = amountMinor < 0 ? "-" : "";
  const abs = Math.abs(amountMinor);
  const major = Math.trunc(abs / 100);
  const minor = abs % 100;
  return `${sign}${major}.${String(minor).padStart(2, "0")} ${currency}`;
}

export function formatMoney(money: Money): string {
  return formatMinor(money.amount_minor, money.currency);
}

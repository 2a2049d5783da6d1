using System;
using System.Collections.Generic;
using Shop.Business.Models;
using Shop.Business.Util;
using Shop.Data.Repositories;

namespace Shop.Business.Services
{
    public class PricingService : BaseService
    {
        private ProductRepository products = new ProductRepository();

        public decimal Quote(List<OrderLine> lines)
        {
            decimal total = 0;
            foreach (OrderLine line in lines)
            {
                decimal price = products.GetPrice(line.ProductId);
                total += MathUtil.Round(price * line.Quantity);
            }
            return total;
        }

        public decimal ApplyDiscount(decimal amount, string code)
        {
            return MathUtil.Round(amount * DiscountRate(code));
        }

        private decimal DiscountRate(string code)
        {
            return code == "GOLD" ? 0.9m : 1.0m;
        }
    }
}

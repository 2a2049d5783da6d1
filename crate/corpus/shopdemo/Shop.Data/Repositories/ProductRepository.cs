using System;
using System.Collections.Generic;
using System.Data;

namespace Shop.Data.Repositories
{
    public class ProductRepository
    {
        public decimal GetPrice(int productId)
        {
            return (decimal)DbHelper.Scalar("usp_Price", productId);
        }

        public List<decimal> PriceHistory(int productId)
        {
            List<decimal> prices = new List<decimal>();
            DataTable table = DbHelper.Query("usp_PriceHistory", productId);
            foreach (DataRow row in table.Rows)
            {
                prices.Add((decimal)row["Price"]);
            }
            return prices;
        }

        public int CountOf(int productId)
        {
            return (int)DbHelper.Scalar("usp_Stock", productId);
        }

        public int WeightOf(int productId)
        {
            return (int)DbHelper.Scalar("usp_Weight", productId);
        }

        public void Decrement(int productId, int quantity)
        {
            DbHelper.Execute("usp_Decrement", productId);
        }

        public int Total()
        {
            return (int)DbHelper.Scalar("usp_StockTotal", 0);
        }
    }
}
